#include "dataset.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>

#include "core/error.hpp"
#include "io/digest.hpp"
#include "io/png_io.hpp"
#include "net/protocol.hpp"

namespace bugworld {

namespace fs = std::filesystem;

namespace {

template <class T>
bool parse_number(std::string_view s, T& out) {
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && end == s.data() + s.size() && !s.empty();
}

std::string numbered(const char* pattern, uint64_t k) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, static_cast<unsigned long long>(k));
  return buf;
}

std::string pixel_checksum(const Image& img) { return sha256_hex(img.bytes()); }

json schedule_to_json(const std::vector<ScheduleEntry>& schedule) {
  json out = json::array();
  for (const auto& e : schedule)
    out.push_back({{"step", e.step}, {"name", e.name}, {"enabled", e.enabled}, {"params", e.params}});
  return out;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + p.string());
}

}  // namespace

ScheduleEntry parse_schedule_entry(std::string_view text) {
  auto bad = [&](const std::string& why) {
    return Error(ErrorCode::kBadArgument, "bad bug schedule '" + std::string(text) + "': " + why);
  };
  ScheduleEntry e;
  std::string_view head = text.substr(0, text.find(','));
  std::string_view rest = head.size() < text.size() ? text.substr(head.size() + 1) : std::string_view();
  const auto at = head.find('@');
  if (at == std::string_view::npos || at == 0) throw bad("expected NAME@STEP");
  e.name = std::string(head.substr(0, at));
  std::string_view step = head.substr(at + 1);
  if (const auto colon = step.find(':'); colon != std::string_view::npos) {
    const std::string_view state = step.substr(colon + 1);
    if (state == "on") e.enabled = true;
    else if (state == "off") e.enabled = false;
    else throw bad("state must be 'on' or 'off'");
    step = step.substr(0, colon);
  }
  if (!parse_number(step, e.step)) throw bad("step must be a non-negative integer");
  while (!rest.empty()) {
    const std::string_view kv = rest.substr(0, rest.find(','));
    rest = kv.size() < rest.size() ? rest.substr(kv.size() + 1) : std::string_view();
    const auto eq = kv.find('=');
    if (eq == std::string_view::npos || eq == 0) throw bad("expected key=value");
    double v = 0;
    if (!parse_number(kv.substr(eq + 1), v)) throw bad("value must be a number");
    e.params[std::string(kv.substr(0, eq))] = v;
  }
  return e;
}

std::string frame_file(uint64_t k) { return numbered("frames/frame_%06llu.png", k); }
std::string mask_file(uint64_t k) { return numbered("masks/mask_%06llu.png", k); }

json generate(const GenerateOptions& o) {
  if (o.steps < 1) throw Error(ErrorCode::kBadArgument, "steps must be at least 1");
  const Behaviour behaviour = parse_behaviour(o.behaviour);
  if (behaviour == Behaviour::kExternal && o.actions.size() < o.steps)
    throw Error(ErrorCode::kBadArgument, "external behaviour needs one action per step");

  Env env(o.env_id, o.config);
  env.set_behaviour(o.behaviour);
  for (const auto& e : o.schedule) {
    env.catalog().id(e.name);  // reject unknown names before touching the disk
  }

  if (fs::exists(o.out_dir) && !fs::is_empty(o.out_dir))
    throw Error(ErrorCode::kIo, "output directory is not empty: " + o.out_dir.string());
  std::error_code ec;
  fs::create_directories(o.out_dir / "frames", ec);
  fs::create_directories(o.out_dir / "masks", ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + o.out_dir.string() + ": " + ec.message());
  write_text(o.out_dir / kIncompleteMarker, "generation in progress\n");

  std::multimap<uint64_t, const ScheduleEntry*> by_step;
  for (const auto& e : o.schedule) by_step.emplace(e.step, &e);

  env.reset(o.config.seed);
  write_text(o.out_dir / "scene.json", scene_to_json(env.scene()).dump(1) + "\n");

  std::ofstream traj(o.out_dir / "trajectory.jsonl", std::ios::binary | std::ios::trunc);
  json files = json::object();
  std::string termination;
  uint64_t k = 0;
  for (; k < o.steps; ++k) {
    const auto [lo, hi] = by_step.equal_range(k);
    for (auto it = lo; it != hi; ++it) env.set_bug(it->second->name, it->second->enabled, it->second->params);
    const Action a = behaviour == Behaviour::kNav ? env.act() : o.actions[k];
    const StepResult r = env.step(a);
    if (!r.obs) {
      termination = "crash";
      break;
    }
    write_png(o.out_dir / frame_file(k), r.obs->frame);
    write_png(o.out_dir / mask_file(k), r.obs->mask);
    files[frame_file(k)] = pixel_checksum(r.obs->frame);
    files[mask_file(k)] = pixel_checksum(r.obs->mask);
    nlohmann::ordered_json row;
    row["step"] = k;
    row["action"] = int(a);
    row["state"] = r.obs->state;
    row["flags"] = flags_to_json(r.info.flags);
    row["active_bugs"] = r.info.active_bugs;
    traj << row.dump() << '\n';
    if (r.info.done) {
      ++k;
      termination = "step_limit";
      break;
    }
  }
  traj.close();
  if (!traj) throw Error(ErrorCode::kIo, "cannot write trajectory.jsonl");

  json manifest{{"version", kDatasetVersion},
                {"env_id", o.env_id},
                {"config", config_to_json(o.config)},
                {"behaviour", o.behaviour},
                {"schedule", schedule_to_json(o.schedule)},
                {"requested_steps", o.steps},
                {"steps", k},
                {"termination", termination.empty() ? json(nullptr) : json(termination)},
                {"palette", palette_to_json(env.registry())},
                {"scene", "scene.json"},
                {"files", files}};
  write_text(o.out_dir / "manifest.json", manifest.dump(1) + "\n");
  fs::remove(o.out_dir / kIncompleteMarker);
  return manifest;
}

std::vector<Violation> validate(const fs::path& dir) {
  std::vector<Violation> v;
  auto add = [&](std::string kind, std::string detail) { v.push_back({std::move(kind), std::move(detail)}); };
  if (fs::exists(dir / kIncompleteMarker)) add("INCOMPLETE", "generation did not finish");

  json manifest;
  {
    std::ifstream in(dir / "manifest.json");
    if (!in) {
      add("MANIFEST", "manifest.json missing");
      return v;
    }
    manifest = json::parse(in, nullptr, false);
  }
  if (manifest.is_discarded() || !manifest.is_object() || !manifest.contains("steps") ||
      !manifest["steps"].is_number_unsigned() || !manifest.contains("palette") ||
      !manifest["palette"].is_object() || !manifest.contains("files") || !manifest["files"].is_object()) {
    add("MANIFEST", "manifest.json is malformed");
    return v;
  }
  if (manifest.value("version", 0) != kDatasetVersion) add("MANIFEST", "unsupported version");
  const uint64_t steps = manifest["steps"].get<uint64_t>();

  std::set<uint32_t> palette;
  for (const auto& [name, c] : manifest["palette"].items()) {
    if (!c.is_array() || c.size() != 3) {
      add("MANIFEST", "palette entry '" + name + "' is not an RGB triple");
      continue;
    }
    palette.insert(c[0].get<uint32_t>() << 16 | c[1].get<uint32_t>() << 8 | c[2].get<uint32_t>());
  }

  // trajectory
  uint64_t rows = 0;
  {
    std::ifstream in(dir / "trajectory.jsonl");
    if (!in) add("MISSING_FILE", "trajectory.jsonl");
    std::string line;
    while (std::getline(in, line)) {
      const json row = json::parse(line, nullptr, false);
      if (row.is_discarded() || !row.is_object()) {
        add("TRAJECTORY", "row " + std::to_string(rows) + " is not a JSON object");
      } else {
        if (!row.contains("step") || !row["step"].is_number_unsigned() || row["step"].get<uint64_t>() != rows)
          add("STEP_ORDER", "row " + std::to_string(rows) + " has step index out of sequence");
        if (!row.contains("action") || !row.contains("state") || !row["state"].is_array() ||
            row["state"].size() != kStateSize || !row.contains("flags") || !row.contains("active_bugs"))
          add("TRAJECTORY", "row " + std::to_string(rows) + " lacks required fields");
      }
      ++rows;
    }
  }
  if (rows != steps)
    add("COUNT", "trajectory has " + std::to_string(rows) + " rows, manifest says " + std::to_string(steps));

  auto count_pngs = [&](const char* sub) {
    uint64_t n = 0;
    std::error_code ec;
    for (const auto& e : fs::directory_iterator(dir / sub, ec))
      if (e.path().extension() == ".png") ++n;
    return n;
  };
  if (const uint64_t n = count_pngs("frames"); n != steps)
    add("COUNT", "frames/ has " + std::to_string(n) + " files, manifest says " + std::to_string(steps));
  if (const uint64_t n = count_pngs("masks"); n != steps)
    add("COUNT", "masks/ has " + std::to_string(n) + " files, manifest says " + std::to_string(steps));

  const json& files = manifest["files"];
  for (uint64_t k = 0; k < steps; ++k) {
    std::optional<Image> frame;
    for (const std::string& name : {frame_file(k), mask_file(k)}) {
      const bool is_mask = name.starts_with("masks/");
      if (!fs::exists(dir / name)) {
        add("MISSING_FILE", name);
        continue;
      }
      Image img;
      try {
        img = read_png(dir / name);
      } catch (const Error& e) {
        add("MISSING_FILE", name + ": " + e.what());
        continue;
      }
      const auto sum = files.find(name);
      if (sum == files.end() || !sum->is_string()) add("CHECKSUM", name + " has no recorded checksum");
      else if (sum->get<std::string>() != pixel_checksum(img)) add("CHECKSUM", name);
      if (!is_mask) {
        frame = std::move(img);
        continue;
      }
      if (frame && (frame->width != img.width || frame->height != img.height))
        add("SHAPE", name + " differs in size from its frame");
      for (const RGB8& c : img.pixels) {
        if (!palette.contains(uint32_t(c.r) << 16 | uint32_t(c.g) << 8 | c.b)) {
          add("PALETTE", name + " has color (" + std::to_string(c.r) + "," + std::to_string(c.g) + "," +
                             std::to_string(c.b) + ")");
          break;
        }
      }
    }
  }
  return v;
}

DatasetReader::DatasetReader(fs::path dir) : dir_(std::move(dir)) {
  std::ifstream in(dir_ / "manifest.json");
  if (!in) throw Error(ErrorCode::kIo, "no manifest.json in " + dir_.string());
  manifest_ = json::parse(in, nullptr, false);
  if (manifest_.is_discarded()) throw Error(ErrorCode::kIo, "manifest.json is not valid JSON");
  std::ifstream traj(dir_ / "trajectory.jsonl");
  if (!traj) throw Error(ErrorCode::kIo, "no trajectory.jsonl in " + dir_.string());
  std::string line;
  while (std::getline(traj, line)) {
    json row = json::parse(line, nullptr, false);
    if (row.is_discarded()) throw Error(ErrorCode::kIo, "trajectory row " + std::to_string(rows_.size()) + " is invalid");
    rows_.push_back(std::move(row));
  }
}

DatasetItem DatasetReader::item(size_t k) const {
  if (k >= rows_.size()) throw Error(ErrorCode::kBadArgument, "dataset index out of range");
  return {read_png(dir_ / frame_file(k)), read_png(dir_ / mask_file(k)), rows_[k]};
}

void DatasetReader::for_each(const std::function<void(const DatasetItem&)>& fn) const {
  for (size_t k = 0; k < rows_.size(); ++k) fn(item(k));
}

}  // namespace bugworld
