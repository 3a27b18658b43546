#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "quadloco/analysis.hpp"
#include "quadloco/costmap.hpp"
#include "quadloco/heightfield.hpp"
#include "quadloco/json_io.hpp"
#include "quadloco/patch.hpp"
#include "quadloco/planner.hpp"
#include "quadloco/png_io.hpp"
#include "quadloco/randomization.hpp"
#include "quadloco/records.hpp"
#include "quadloco/rewards.hpp"
#include "quadloco/smogn.hpp"
#include "quadloco/stability.hpp"
#include "quadloco/terrain_json.hpp"

namespace quadloco::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
namespace qj = quadloco::json;

// ─── Files ──────────────────────────────────────────────────────────────────

std::string readText(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

json readJson(const std::string& path) {
  try {
    return json::parse(readText(path));
  } catch (const json::parse_error& e) {
    throw IoError("malformed JSON in " + path + ": " + e.what());
  }
}

void refuseOverwrite(const std::string& path, bool force) {
  if (!force && fs::exists(path)) throw IoError(path + " exists; pass --force to overwrite");
}

/// Writes through a temporary file so a reader never sees a partial artifact.
void writeFile(const std::string& path, std::string_view bytes, bool force) {
  refuseOverwrite(path, force);
  std::ostringstream tmp_name;
  tmp_name << path << ".tmp." << std::this_thread::get_id();
  const std::string tmp = tmp_name.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed for " + path);
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move output into place at " + path);
  }
}

void writeFile(const std::string& path, const std::vector<std::uint8_t>& bytes, bool force) {
  writeFile(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()), force);
}

void writeHeightfield(const Heightfield& hf, const std::string& path, bool force) {
  refuseOverwrite(path, force);
  refuseOverwrite(path + ".json", force);
  writeFile(path + ".json", sidecarJson(hf).dump(2) + "\n", true);
  writeFile(path, encodePng(hf), true);
}

/// JSON artifacts go to --out when given, otherwise to stdout.
void emitJson(const json& j, const std::string& out_path, bool force, std::ostream& out) {
  const std::string text = j.dump(2) + "\n";
  if (out_path.empty()) {
    out << text;
  } else {
    writeFile(out_path, text, force);
  }
}

std::uint64_t requireSeed(const std::optional<std::uint64_t>& seed, const std::string& command) {
  if (!seed) throw InvalidArgument(command + " is randomized and needs an explicit --seed");
  return *seed;
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// ─── Option blocks ──────────────────────────────────────────────────────────

struct Common {
  std::string out;
  bool force = false;
  std::optional<std::uint64_t> seed;
};

void addCommon(CLI::App* cmd, Common& c, bool with_seed) {
  cmd->add_option("--out", c.out, "output path");
  cmd->add_flag("--force", c.force, "overwrite existing outputs");
  if (with_seed) cmd->add_option("--seed", c.seed, "random seed");
}

struct PoseArgs {
  double x = 0.0, y = 0.0, yaw = 0.0;
};

void addPose(CLI::App* cmd, PoseArgs& p) {
  cmd->add_option("--x", p.x, "x position (m)");
  cmd->add_option("--y", p.y, "y position (m)");
  cmd->add_option("--yaw", p.yaw, "heading (rad)");
}

GridAxis parseAxis(const std::string& text, const std::string& name) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) parts.push_back(item);
  if (parts.size() != 3) throw InvalidArgument(name + " must be 'lo,hi,count'");
  try {
    GridAxis a{std::stod(parts[0]), std::stod(parts[1]), std::stoi(parts[2])};
    require(a.count >= 1 && a.lo <= a.hi, name + " needs lo <= hi and count >= 1");
    return a;
  } catch (const std::logic_error&) {
    throw InvalidArgument(name + " must be 'lo,hi,count'");
  }
}

RelevanceSpec relevanceFromJson(const json& j) {
  RelevanceSpec s;
  if (j.contains("method")) {
    const std::string m = j["method"].get<std::string>();
    if (m == "histogram") {
      s.method = RelevanceSpec::Method::HistogramRarity;
    } else if (m == "boxplot") {
      s.method = RelevanceSpec::Method::BoxplotExtremes;
    } else {
      throw InvalidArgument("relevance method must be 'histogram' or 'boxplot'");
    }
  }
  s.threshold = j.value("threshold", s.threshold);
  if (j.contains("target_columns")) s.target_columns = j["target_columns"].get<std::vector<int>>();
  s.categorical = j.value("categorical", s.categorical);
  s.bins = j.value("bins", s.bins);
  s.k_neighbors = j.value("k_neighbors", s.k_neighbors);
  s.noise_scale = j.value("noise_scale", s.noise_scale);
  s.rare_ratio = j.value("rare_ratio", s.rare_ratio);
  s.size_ratio = j.value("size_ratio", s.size_ratio);
  return s;
}

GaitConfig parseGaitConfig(const std::string& text) {
  GaitConfig g;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InvalidArgument("gait config line without '=': " + line);
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t\r"));
      s.erase(s.find_last_not_of(" \t\r") + 1);
      return s;
    };
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key == "gait") {
      g.gait = gaitFromName(value);
    } else if (key == "stance_duration") {
      try {
        g.stance_duration = std::stod(value);
      } catch (const std::logic_error&) {
        throw InvalidArgument("malformed stance_duration");
      }
      require(g.stance_duration > 0.0, "stance_duration must be positive");
    } else {
      throw InvalidArgument("unknown gait config key '" + key + "'");
    }
  }
  return g;
}

json footholdsJson(const Footholds& f) {
  json arr = json::array();
  for (const auto& p : f) arr.push_back(qj::vec(p));
  return arr;
}

json footholdsJson(const Footholds3& f) {
  json arr = json::array();
  for (const auto& p : f) arr.push_back(qj::vec(p));
  return arr;
}

// ─── Error reporting ────────────────────────────────────────────────────────

int report(std::ostream& err, int code, const std::string& kind, const std::string& message) {
  err << json{{"error", {{"kind", kind}, {"message", message}, {"exit_code", code}}}}.dump() << "\n";
  return code;
}

// ─── Batch ──────────────────────────────────────────────────────────────────

struct BatchEntry {
  std::string id;
  std::string command;
  std::optional<std::uint64_t> seed;
  json args = json::object();
};

std::string outputExtension(const std::string& command) {
  if (command == "terrain-gen" || command == "terrain-eval") return ".png";
  if (command == "patch" || command == "costmap" || command == "resample" || command == "randomize" ||
      command == "kde")
    return ".csv";
  return ".json";
}

const std::vector<std::string>& pathKeys() {
  static const std::vector<std::string> keys{"spec",    "terrain", "state",   "contacts", "query", "snapshot",
                                             "weights", "input",   "trials",  "config",   "grid",  "augment",
                                             "pgm"};
  return keys;
}

std::vector<BatchEntry> parseManifest(const json& manifest) {
  const json& list = manifest.is_array() ? manifest : manifest.at("entries");
  if (!list.is_array()) throw InvalidArgument("manifest entries must be an array");
  std::vector<BatchEntry> entries;
  for (const auto& item : list) {
    BatchEntry e;
    e.id = item.at("id").get<std::string>();
    e.command = item.at("command").get<std::string>();
    if (item.contains("seed") && !item["seed"].is_null()) e.seed = item["seed"].get<std::uint64_t>();
    if (item.contains("args")) e.args = item["args"];
    if (!e.args.is_object()) throw InvalidArgument("entry '" + e.id + "': args must be an object");
    if (e.id.empty() || e.id.find_first_not_of("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789._-") !=
                            std::string::npos)
      throw InvalidArgument("entry id '" + e.id + "' may only use letters, digits, '.', '_' and '-'");
    if (e.command == "batch") throw InvalidArgument("batches cannot nest");
    for (const char* reserved : {"out", "seed", "force"})
      if (e.args.contains(reserved)) throw InvalidArgument("entry '" + e.id + "' may not set --" + reserved);
    entries.push_back(std::move(e));
  }
  std::vector<std::string> ids;
  for (const auto& e : entries) ids.push_back(e.id);
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) throw InvalidArgument("manifest ids must be unique");
  return entries;
}

std::vector<std::string> entryArgs(const BatchEntry& e, const fs::path& base, const std::string& out_path,
                                   bool force) {
  std::vector<std::string> argv{e.command};
  for (const auto& [key, value] : e.args.items()) {
    const std::string flag = "--" + key;
    if (value.is_boolean()) {
      if (value.get<bool>()) argv.push_back(flag);
      continue;
    }
    std::string text = value.is_string() ? value.get<std::string>() : value.dump();
    if (value.is_string() && std::find(pathKeys().begin(), pathKeys().end(), key) != pathKeys().end()) {
      const fs::path p(text);
      if (p.is_relative()) text = (base / p).string();
    }
    argv.push_back(flag);
    argv.push_back(text);
  }
  if (e.seed) {
    argv.push_back("--seed");
    argv.push_back(std::to_string(*e.seed));
  }
  argv.push_back("--out");
  argv.push_back(out_path);
  if (force) argv.push_back("--force");
  return argv;
}

struct EntryOutcome {
  std::string status;
  int exit_code = 0;
  std::string output;
  std::string digest;
};

int runBatch(const std::string& manifest_path, const std::string& out_dir, int workers, bool force,
             std::ostream& out) {
  if (out_dir.empty()) throw InvalidArgument("batch needs --out <directory>");
  require(workers >= 1, "--workers must be at least one");
  const json manifest = readJson(manifest_path);
  std::vector<BatchEntry> entries;
  try {
    entries = parseManifest(manifest);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed manifest: ") + e.what());
  }
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) throw IoError("cannot create batch directory " + out_dir);
  const fs::path base = fs::absolute(manifest_path).parent_path();

  std::vector<EntryOutcome> outcomes(entries.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= entries.size()) return;
      const BatchEntry& e = entries[i];
      EntryOutcome& o = outcomes[i];
      const std::string name = e.id + outputExtension(e.command);
      const std::string path = (fs::path(out_dir) / name).string();
      const std::string error_path = (fs::path(out_dir) / (e.id + ".error.json")).string();
      o.output = name;
      if (!force && fs::exists(path)) {
        o.status = "skipped";
      } else {
        std::ostringstream sink, err;
        // The primary output is absent here, so any companion files (sidecars) are stale.
        o.exit_code = run(entryArgs(e, base, path, true), sink, err);
        o.status = o.exit_code == kExitOk ? "ok" : "failed";
        std::error_code rm;
        if (o.exit_code != kExitOk) {
          std::ofstream(error_path, std::ios::trunc) << err.str();
          o.output.clear();
        } else {
          fs::remove(error_path, rm);
        }
      }
      if (!o.output.empty()) {
        try {
          o.digest = hex(fnv1a(readText(path)));
        } catch (const IoError&) {
          o.status = "failed";
          o.exit_code = kExitIo;
          o.output.clear();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  const int n = std::min<int>(workers, std::max<std::size_t>(entries.size(), 1));
  for (int t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::string summary = "id,command,seed,status,exit_code,output,fnv1a64\n";
  int ok = 0, skipped = 0, failed = 0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    const auto& o = outcomes[i];
    summary += e.id + "," + e.command + "," + (e.seed ? std::to_string(*e.seed) : "") + "," + o.status + "," +
               std::to_string(o.exit_code) + "," + o.output + "," + o.digest + "\n";
    if (o.status == "ok") ++ok;
    if (o.status == "skipped") ++skipped;
    if (o.status == "failed") ++failed;
  }
  // The summary describes the latest pass over the manifest, so it is always rewritten.
  writeFile((fs::path(out_dir) / "summary.csv").string(), summary, true);
  out << json{{"entries", entries.size()}, {"executed", ok}, {"skipped", skipped}, {"failed", failed}}.dump()
      << "\n";
  return failed ? kExitFailure : kExitOk;
}

// ─── Dispatch ───────────────────────────────────────────────────────────────

int dispatch(const std::vector<std::string>& args, std::ostream& out) {
  CLI::App app{"Quadruped locomotion toolkit: terrain, stability, planning and dataset tools", "quadloco"};
  app.require_subcommand(1);
  app.fallthrough(false);

  // terrain-gen
  Common tg;
  std::string tg_spec;
  auto* terrain_gen = app.add_subcommand("terrain-gen", "procedural training terrain from an object list");
  addCommon(terrain_gen, tg, true);
  terrain_gen->add_option("--spec", tg_spec, "JSON array of terrain objects")->required();

  // terrain-eval
  Common te;
  std::string te_kind;
  std::optional<double> te_length;
  auto* terrain_eval = app.add_subcommand("terrain-eval", "5 x 5 m evaluation terrain with one random object");
  addCommon(terrain_eval, te, true);
  terrain_eval->add_option("--kind", te_kind, "stairs | wave | bricks | unstructured | planks")->required();
  terrain_eval->add_option("--length", te_length, "object side length (m); sampled when omitted");

  // patch
  Common pa;
  PoseArgs pa_pose;
  std::string pa_terrain, pa_augment;
  double pa_ref = 0.0;
  auto* patch = app.add_subcommand("patch", "91 x 91 robot-local elevation patch as a CSV grid");
  addCommon(patch, pa, true);
  addPose(patch, pa_pose);
  patch->add_option("--terrain", pa_terrain, "heightfield PNG")->required();
  patch->add_option("--reference-height", pa_ref, "height subtracted from every cell");
  patch->add_option("--augment", pa_augment, "JSON augmentation spec (needs --seed)");

  // costmap
  Common cm;
  PoseArgs cm_pose;
  std::string cm_grid, cm_terrain;
  auto* costmap = app.add_subcommand("costmap", "edge cost map of a height grid");
  addCommon(costmap, cm, false);
  addPose(costmap, cm_pose);
  costmap->add_option("--grid", cm_grid, "height grid CSV");
  costmap->add_option("--terrain", cm_terrain, "heightfield PNG; a patch is sliced at the pose");

  // margin / region
  Common mg, rg;
  std::string mg_state, mg_contacts, rg_state, rg_contacts;
  double mg_tol = kDefaultRegionTolerance, rg_tol = kDefaultRegionTolerance;
  auto* margin = app.add_subcommand("margin", "ICP stability margin");
  addCommon(margin, mg, false);
  margin->add_option("--state", mg_state, "centroidal state JSON")->required();
  margin->add_option("--contacts", mg_contacts, "contact set JSON")->required();
  margin->add_option("--tol", mg_tol, "region tolerance (m)");
  auto* region = app.add_subcommand("region", "feasible region of the reference point");
  addCommon(region, rg, false);
  region->add_option("--state", rg_state, "centroidal state JSON")->required();
  region->add_option("--contacts", rg_contacts, "contact set JSON")->required();
  region->add_option("--tol", rg_tol, "region tolerance (m)");

  // plan
  Common pl;
  std::string pl_query, pl_terrain, pl_config, pl_mode = "qp";
  double pl_radius = kPerceptiveRadius;
  auto* plan = app.add_subcommand("plan", "baseline foothold planning");
  addCommon(plan, pl, false);
  plan->add_option("--query", pl_query, "foothold query JSON")->required();
  plan->add_option("--terrain", pl_terrain, "heightfield PNG (blind and perceptive modes)");
  plan->add_option("--config", pl_config, "gait config (gait, stance_duration)");
  plan->add_option("--mode", pl_mode, "qp | blind | perceptive");
  plan->add_option("--radius", pl_radius, "perceptive search radius (m)");

  // gate
  Common ga;
  PoseArgs ga_pose;
  std::string ga_terrain;
  double ga_vx = 0.0, ga_vy = 0.0, ga_wz = 0.0;
  GateConfig ga_config;
  bool ga_sample = false;
  auto* gate = app.add_subcommand("gate", "terrain gate for velocity commands");
  addCommon(gate, ga, true);
  addPose(gate, ga_pose);
  gate->add_option("--terrain", ga_terrain, "heightfield PNG")->required();
  gate->add_option("--vx", ga_vx, "forward velocity (m/s)");
  gate->add_option("--vy", ga_vy, "lateral velocity (m/s)");
  gate->add_option("--wz", ga_wz, "yaw rate (rad/s)");
  gate->add_option("--threshold", ga_config.threshold, "height-variation threshold (m)");
  gate->add_option("--horizon", ga_config.horizon, "look-ahead horizon (s)");
  gate->add_flag("--sample", ga_sample, "draw random commands until one passes (needs --seed)");

  // reward
  Common rw;
  std::string rw_snapshot, rw_weights, rw_kind = "recovery";
  double rw_curriculum = 1.0;
  auto* reward = app.add_subcommand("reward", "reward of a robot snapshot");
  addCommon(reward, rw, false);
  reward->add_option("--snapshot", rw_snapshot, "snapshot JSON")->required();
  reward->add_option("--kind", rw_kind, "footstep-recurrent | footstep-final | recovery | tracking");
  reward->add_option("--weights", rw_weights, "weights JSON");
  reward->add_option("--curriculum", rw_curriculum, "curriculum factor in [0, 1]");

  // resample
  Common rs;
  std::string rs_input, rs_config;
  auto* resample = app.add_subcommand("resample", "SMOGN resampling of a record CSV");
  addCommon(resample, rs, true);
  resample->add_option("--input", rs_input, "record CSV (label last)")->required();
  resample->add_option("--config", rs_config, "relevance/resampling JSON");

  // randomize
  Common rd;
  std::string rd_policy = "recovery", rd_config;
  int rd_count = 1;
  auto* randomize = app.add_subcommand("randomize", "domain-randomization draws");
  addCommon(randomize, rd, true);
  randomize->add_option("--policy", rd_policy, "recovery | tracking | footstep");
  randomize->add_option("--config", rd_config, "key = value ranges");
  randomize->add_option("--count", rd_count, "number of draws");

  // kde
  Common kd;
  std::string kd_trials, kd_xrange = "0,1,11", kd_yrange = "0,1,11", kd_pgm;
  std::optional<double> kd_bwx, kd_bwy;
  auto* kde = app.add_subcommand("kde", "kernel-smoothed success-rate grid");
  addCommon(kde, kd, false);
  kde->add_option("--trials", kd_trials, "CSV with x, y, success columns")->required();
  kde->add_option("--x-range", kd_xrange, "lo,hi,count");
  kde->add_option("--y-range", kd_yrange, "lo,hi,count");
  kde->add_option("--bandwidth-x", kd_bwx, "x bandwidth; Silverman when omitted");
  kde->add_option("--bandwidth-y", kd_bwy, "y bandwidth; Silverman when omitted");
  kde->add_option("--pgm", kd_pgm, "optional PGM preview path");

  // batch
  Common bt;
  std::string bt_manifest;
  int bt_workers = 1;
  auto* batch = app.add_subcommand("batch", "run a manifest of commands");
  addCommon(batch, bt, false);
  batch->add_option("--manifest", bt_manifest, "manifest JSON")->required();
  batch->add_option("--workers", bt_workers, "concurrent entries");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    std::ostringstream help_err;
    app.exit(e, out, help_err);
    return kExitOk;
  }

  if (terrain_gen->parsed()) {
    const auto seed = requireSeed(tg.seed, "terrain-gen");
    if (tg.out.empty()) throw InvalidArgument("terrain-gen needs --out");
    std::vector<TerrainObjectSpec> specs;
    const json j = readJson(tg_spec);
    specs = specsFromJson(j.is_object() && j.contains("objects") ? j["objects"] : j);
    const Heightfield hf = generateTerrain(specs, seed);
    writeHeightfield(hf, tg.out, tg.force);
    out << json{{"out", tg.out}, {"rows", hf.rows}, {"cols", hf.cols}, {"objects", specs.size()}}.dump() << "\n";
  } else if (terrain_eval->parsed()) {
    const auto seed = requireSeed(te.seed, "terrain-eval");
    if (te.out.empty()) throw InvalidArgument("terrain-eval needs --out");
    auto [shape, length] = sampleEvalObject(terrainKindFromName(te_kind), seed);
    if (te_length) length = *te_length;
    const Heightfield hf = composeEvalTerrain(shape, length, seed);
    writeHeightfield(hf, te.out, te.force);
    out << json{{"out", te.out}, {"object", shapeToJson(shape)}, {"length", length}}.dump() << "\n";
  } else if (patch->parsed()) {
    if (pa.out.empty()) throw InvalidArgument("patch needs --out");
    const Heightfield hf = loadHeightfield(pa_terrain);
    ElevationPatch p = slicePatch(hf, Vec2(pa_pose.x, pa_pose.y), pa_pose.yaw, pa_ref);
    if (!pa_augment.empty()) {
      const auto seed = requireSeed(pa.seed, "patch --augment");
      const json a = readJson(pa_augment);
      AugmentationSpec spec;
      spec.rotation = a.value("rotation", spec.rotation);
      spec.mirror_x = a.value("mirror_x", spec.mirror_x);
      spec.mirror_y = a.value("mirror_y", spec.mirror_y);
      spec.contrast_gain = a.value("contrast_gain", spec.contrast_gain);
      spec.noise_sigma = a.value("noise_sigma", spec.noise_sigma);
      p = augmentPatch(p, spec, seed);
    }
    writeFile(pa.out, gridCsv(toGrid(p)), pa.force);
  } else if (costmap->parsed()) {
    if (cm.out.empty()) throw InvalidArgument("costmap needs --out");
    if (cm_grid.empty() == cm_terrain.empty()) throw InvalidArgument("costmap needs exactly one of --grid or --terrain");
    Grid2 heights;
    if (!cm_grid.empty()) {
      heights = parseGridCsv(readText(cm_grid));
    } else {
      heights = toGrid(slicePatch(loadHeightfield(cm_terrain), Vec2(cm_pose.x, cm_pose.y), cm_pose.yaw));
    }
    writeFile(cm.out, gridCsv(edgeCostMap(heights)), cm.force);
  } else if (margin->parsed()) {
    const CentroidalState state = qj::stateFromJson(readJson(mg_state));
    const ContactSet contacts = qj::contactSetFromJson(readJson(mg_contacts));
    emitJson(qj::toJson(stabilityMargin(state, contacts, mg_tol)), mg.out, mg.force, out);
  } else if (region->parsed()) {
    const CentroidalState state = qj::stateFromJson(readJson(rg_state));
    const ContactSet contacts = qj::contactSetFromJson(readJson(rg_contacts));
    emitJson(qj::toJson(feasibleRegion(contacts, state, rg_tol)), rg.out, rg.force, out);
  } else if (plan->parsed()) {
    FootholdQuery q = qj::footholdQueryFromJson(readJson(pl_query));
    json result{{"mode", pl_mode}};
    if (!pl_config.empty()) {
      const GaitConfig g = parseGaitConfig(readText(pl_config));
      q.stance_duration = g.stance_duration;
      result["gait"] = g.gait == Gait::Trot ? "trot" : "crawl";
    }
    result["reference"] = footholdsJson(referenceFootholds(q));
    if (pl_mode == "qp") {
      result["footholds"] = footholdsJson(optimizeFootholds(q));
    } else if (pl_mode == "blind" || pl_mode == "perceptive") {
      if (pl_terrain.empty()) throw InvalidArgument("plan --mode " + pl_mode + " needs --terrain");
      const Heightfield hf = loadHeightfield(pl_terrain);
      result["footholds"] = footholdsJson(pl_mode == "blind" ? blindPlan(q, hf) : perceptivePlan(q, hf, pl_radius));
    } else {
      throw InvalidArgument("plan --mode must be qp, blind or perceptive");
    }
    emitJson(result, pl.out, pl.force, out);
  } else if (gate->parsed()) {
    const Heightfield hf = loadHeightfield(ga_terrain);
    const Pose2 pose{Vec2(ga_pose.x, ga_pose.y), ga_pose.yaw};
    json result;
    if (ga_sample) {
      const SampledCommand s = resampleCommand(hf, pose, requireSeed(ga.seed, "gate --sample"), {}, ga_config);
      const GateDecision d = velocityGate(hf, pose, s.command, ga_config);
      result = {{"accepted", d.accepted},
                {"deviation", d.deviation},
                {"command", {{"vx", s.command.linear.x()}, {"vy", s.command.linear.y()}, {"wz", s.command.yaw_rate}}},
                {"attempts", s.attempts}};
    } else {
      const VelocityCommand cmd{Vec2(ga_vx, ga_vy), ga_wz};
      const GateDecision d = velocityGate(hf, pose, cmd, ga_config);
      result = {{"accepted", d.accepted}, {"deviation", d.deviation}};
    }
    emitJson(result, ga.out, ga.force, out);
  } else if (reward->parsed()) {
    const json snap = readJson(rw_snapshot);
    const json weights = rw_weights.empty() ? json::object() : readJson(rw_weights);
    const Curriculum curriculum{rw_curriculum};
    double value = 0.0;
    if (rw_kind == "footstep-recurrent") {
      value = footstepRecurrentReward(qj::snapshotFromJson(snap), qj::recurrentWeightsFromJson(weights), curriculum);
    } else if (rw_kind == "footstep-final") {
      value = footstepFinalReward(qj::snapshotFromJson(snap), qj::finalWeightsFromJson(weights), curriculum);
    } else if (rw_kind == "recovery") {
      value = recoveryReward(qj::snapshotFromJson(snap), qj::recoveryWeightsFromJson(weights), curriculum);
    } else if (rw_kind == "tracking") {
      const auto desired = snap.at("desired").get<std::vector<double>>();
      const auto measured = snap.at("measured").get<std::vector<double>>();
      const auto w = weights.contains("state") ? weights["state"].get<std::vector<double>>()
                                               : std::vector<double>(desired.size(), 1.0);
      value = trackingReward(desired, measured, snap.value("stability_margin", 0.0), w, weights.value("stability", 1.0),
                             curriculum);
    } else {
      throw InvalidArgument("unknown reward kind '" + rw_kind + "'");
    }
    emitJson(json{{"kind", rw_kind}, {"reward", value}}, rw.out, rw.force, out);
  } else if (resample->parsed()) {
    const auto seed = requireSeed(rs.seed, "resample");
    if (rs.out.empty()) throw InvalidArgument("resample needs --out");
    const RelevanceSpec spec = rs_config.empty() ? RelevanceSpec{} : relevanceFromJson(readJson(rs_config));
    const ResampleResult r = smognResample(readCsv(readText(rs_input)), spec, seed);
    RecordSet prov{{"row", "origin", "parent", "neighbor", "lambda", "rare"}, {}};
    for (std::size_t i = 0; i < r.provenance.size(); ++i) {
      const auto& p = r.provenance[i];
      prov.rows.push_back({static_cast<double>(i), static_cast<double>(static_cast<int>(p.origin)),
                           static_cast<double>(p.parent), static_cast<double>(p.neighbor), p.lambda,
                           r.rare[i] ? 1.0 : 0.0});
    }
    refuseOverwrite(rs.out, rs.force);
    writeFile(rs.out + ".provenance.csv", writeCsv(prov), rs.force);
    writeFile(rs.out, writeCsv(r.records), true);
    std::size_t rare = 0;
    for (bool b : r.rare) rare += b;
    out << json{{"out", rs.out}, {"rows", r.records.size()}, {"synthetic", r.synthetic}, {"rare", rare}}.dump() << "\n";
  } else if (randomize->parsed()) {
    const auto seed = requireSeed(rd.seed, "randomize");
    require(rd_count >= 1, "--count must be at least one");
    const RandomizationConfig cfg = rd_config.empty() ? RandomizationConfig{} : parseRandomizationConfig(readText(rd_config));
    const PolicyKind kind = policyKindFromName(rd_policy);
    RecordSet set{{"draw", "gravity", "torque_scale", "mass_scale", "size_scale", "damping_gain", "force_x", "force_y",
                   "force_duration", "elevation_smoothing"},
                  {}};
    for (int i = 0; i < rd_count; ++i) {
      const auto a = sampleRandomization(cfg, kind, seed + static_cast<std::uint64_t>(i));
      set.rows.push_back({static_cast<double>(i), a.gravity, a.torque_scale, a.mass_scale, a.size_scale, a.damping_gain,
                          a.base_force.x(), a.base_force.y(), a.force_duration, a.elevation_smoothing ? 1.0 : 0.0});
    }
    const std::string csv = writeCsv(set);
    if (rd.out.empty()) {
      out << csv;
    } else {
      writeFile(rd.out, csv, rd.force);
    }
  } else if (kde->parsed()) {
    if (kd.out.empty()) throw InvalidArgument("kde needs --out");
    const RecordSet t = readCsv(readText(kd_trials));
    auto column = [&](const std::string& name) {
      const auto it = std::find(t.columns.begin(), t.columns.end(), name);
      if (it == t.columns.end()) throw InvalidArgument("trial CSV lacks a '" + name + "' column");
      return static_cast<std::size_t>(it - t.columns.begin());
    };
    const std::size_t cx = column("x"), cy = column("y"), cs = column("success");
    std::vector<TrialRecord> trials;
    for (const auto& row : t.rows) {
      require(row[cs] == 0.0 || row[cs] == 1.0, "success must be 0 or 1");
      trials.push_back({row[cx], row[cy], row[cs] == 1.0, {}});
    }
    const SuccessGrid grid =
        kdeSuccessGrid(trials, parseAxis(kd_xrange, "--x-range"), parseAxis(kd_yrange, "--y-range"), kd_bwx, kd_bwy);
    if (!kd_pgm.empty()) refuseOverwrite(kd_pgm, kd.force);
    writeFile(kd.out, successGridCsv(grid), kd.force);
    if (!kd_pgm.empty()) writeFile(kd_pgm, successGridPgm(grid), true);
  } else if (batch->parsed()) {
    return runBatch(bt_manifest, bt.out, bt_workers, bt.force, out);
  }
  return kExitOk;
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"terrain-gen", "terrain-eval", "patch",  "costmap",   "margin",
                                              "region",      "plan",         "gate",   "reward",    "resample",
                                              "randomize",   "kde",          "batch"};
  return names;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  if (args.empty()) return report(err, kExitUsage, "usage", "missing subcommand");
  const std::string& first = args.front();
  const bool help = first == "-h" || first == "--help";
  if (!help && std::find(subcommands().begin(), subcommands().end(), first) == subcommands().end())
    return report(err, kExitUsage, "usage", "unknown subcommand '" + first + "'");
  try {
    return dispatch(args, out);
  } catch (const CLI::ParseError& e) {
    return report(err, kExitValidation, "validation", e.what());
  } catch (const IoError& e) {
    return report(err, kExitIo, "io", e.what());
  } catch (const nlohmann::json::parse_error& e) {
    return report(err, kExitIo, "io", e.what());
  } catch (const InvalidArgument& e) {
    return report(err, kExitValidation, "validation", e.what());
  } catch (const OutOfExtent& e) {
    return report(err, kExitValidation, "out_of_extent", e.what());
  } catch (const nlohmann::json::exception& e) {
    return report(err, kExitValidation, "validation", std::string("malformed input: ") + e.what());
  } catch (const BudgetExhausted& e) {
    return report(err, kExitFailure, "budget_exhausted", e.what());
  } catch (const NumericalFailure& e) {
    return report(err, kExitFailure, "numerical", e.what());
  } catch (const std::exception& e) {
    return report(err, kExitFailure, "internal", e.what());
  }
}

}  // namespace quadloco::cli
