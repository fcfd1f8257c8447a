#include "cera/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "cera/errors.hpp"

namespace cera {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::uint64_t parse_uint(std::string_view text, std::string_view what) {
  const auto t = trim(text);
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw InvalidSpec(fmt::format("{} must be a non-negative integer, got '{}'", what, t));
  }
  return value;
}

std::uint32_t to_u32(std::uint64_t v, std::string_view what) {
  if (v > 0xffffffffULL) throw InvalidSpec(fmt::format("{} is too large", what));
  return static_cast<std::uint32_t>(v);
}

CodebookSpec assemble_spec(std::optional<std::uint64_t> frame_length, std::vector<std::uint32_t> budgets,
                           Mode mode, std::uint32_t global) {
  if (budgets.empty()) throw InvalidSpec("spec needs budgets m");
  if (frame_length) {
    if (*frame_length == 0) throw InvalidSpec("L must be at least 1");
    if (budgets.size() == 1 && *frame_length > 1) {
      budgets.assign(*frame_length, budgets.front());
    } else if (budgets.size() != *frame_length) {
      throw InvalidSpec(fmt::format("L={} but {} budgets given", *frame_length, budgets.size()));
    }
  }
  return CodebookSpec(mode, std::move(budgets), global);
}

std::uint64_t json_uint(const nlohmann::json& v, std::string_view what) {
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
    throw InvalidSpec(fmt::format("{} must be a non-negative integer", what));
  }
  return v.get<std::uint64_t>();
}

}  // namespace

CodebookSpec spec_from_json(const nlohmann::json& doc) {
  if (doc.is_string()) return parse_spec(doc.get<std::string>());
  if (!doc.is_object()) throw InvalidSpec("spec must be an object or an inline string");
  std::optional<std::uint64_t> frame_length;
  if (doc.contains("L")) frame_length = json_uint(doc["L"], "L");
  std::vector<std::uint32_t> budgets;
  if (!doc.contains("m")) throw InvalidSpec("spec needs budgets m");
  const auto& m = doc["m"];
  if (m.is_array()) {
    for (const auto& v : m) budgets.push_back(to_u32(json_uint(v, "m"), "m"));
  } else {
    budgets.push_back(to_u32(json_uint(m, "m"), "m"));
  }
  Mode mode = Mode::Expanded;
  if (doc.contains("mode")) {
    if (!doc["mode"].is_string()) throw InvalidSpec("mode must be a string");
    mode = mode_from_string(doc["mode"].get<std::string>());
  }
  std::uint32_t global = 0;
  if (doc.contains("M")) global = to_u32(json_uint(doc["M"], "M"), "M");
  return assemble_spec(frame_length, std::move(budgets), mode, global);
}

nlohmann::json spec_to_json(const CodebookSpec& spec) {
  return {{"L", spec.frame_length()},
          {"m", spec.budgets()},
          {"mode", to_string(spec.mode())},
          {"M", spec.global_preambles()}};
}

CodebookSpec parse_spec(std::string_view text) {
  const auto t = trim(text);
  if (t.empty()) throw InvalidSpec("empty spec");
  std::error_code ec;
  if (t.front() == '{' || (t.find('=') == std::string::npos && std::filesystem::is_regular_file(t, ec))) {
    std::string content = t;
    if (t.front() != '{') {
      std::ifstream in(t);
      std::stringstream ss;
      ss << in.rdbuf();
      content = ss.str();
    }
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(content);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("spec JSON: ") + e.what());
    }
    return spec_from_json(doc);
  }

  std::optional<std::uint64_t> frame_length;
  std::vector<std::uint32_t> budgets;
  Mode mode = Mode::Expanded;
  std::uint32_t global = 0;
  std::string key;
  std::stringstream ss(t);
  std::string token;
  while (std::getline(ss, token, ',')) {
    std::string value = trim(token);
    if (const auto eq = value.find('='); eq != std::string::npos) {
      key = trim(value.substr(0, eq));
      value = trim(value.substr(eq + 1));
    } else if (key != "m") {
      throw InvalidSpec(fmt::format("unexpected token '{}' in spec", value));
    }
    if (key == "L") {
      frame_length = parse_uint(value, "L");
    } else if (key == "m") {
      budgets.push_back(to_u32(parse_uint(value, "m"), "m"));
    } else if (key == "mode") {
      mode = mode_from_string(value);
    } else if (key == "M") {
      global = to_u32(parse_uint(value, "M"), "M");
    } else {
      throw InvalidSpec(fmt::format("unknown spec key '{}'", key));
    }
  }
  return assemble_spec(frame_length, std::move(budgets), mode, global);
}

Scenario parse_scenario(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("scenario JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("scenario must be a JSON object");
  if (!doc.contains("spec")) throw InvalidSpec("scenario needs a spec");
  Scenario s{spec_from_json(doc["spec"]), {}, 0, 0};
  if (!doc.contains("N")) throw InvalidSpec("scenario needs N");
  if (doc["N"].is_array()) {
    for (const auto& v : doc["N"]) s.users.push_back(json_uint(v, "N"));
  } else {
    s.users.push_back(json_uint(doc["N"], "N"));
  }
  if (s.users.empty()) throw InvalidSpec("scenario N list is empty");
  for (auto n : s.users) {
    if (n == 0) throw InvalidSpec("N must be at least 1");
  }
  s.trials = doc.contains("trials") ? json_uint(doc["trials"], "trials") : 100'000;
  if (s.trials == 0) throw InvalidSpec("trials must be at least 1");
  s.master_seed = doc.contains("master_seed") ? json_uint(doc["master_seed"], "master_seed") : 0;
  return s;
}

nlohmann::json scenario_to_json(const Scenario& scenario) {
  return {{"spec", spec_to_json(scenario.spec)},
          {"N", scenario.users},
          {"trials", scenario.trials},
          {"master_seed", scenario.master_seed}};
}

std::vector<std::uint64_t> parse_grid(std::string_view text) {
  std::vector<std::uint64_t> parts;
  std::stringstream ss{std::string(text)};
  std::string token;
  while (std::getline(ss, token, ':')) parts.push_back(parse_uint(token, "N-range"));
  if (parts.empty() || parts.size() > 3) throw InvalidSpec("N-range must look like A:B:step");
  try {
    return make_grid(parts[0], parts.size() > 1 ? parts[1] : parts[0], parts.size() > 2 ? parts[2] : 1);
  } catch (const DomainError& e) {
    throw InvalidSpec(std::string("N-range: ") + e.what());
  }
}

std::string describe_grid(std::span<const std::uint64_t> grid) {
  if (grid.empty()) return "";
  const auto step = grid.size() > 1 ? grid[1] - grid[0] : 1;
  return fmt::format("{}:{}:{}", grid.front(), grid.back(), step);
}

std::string format_fixed(double value, int decimals) {
  auto s = fmt::format("{:.{}f}", value, decimals);
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

std::string curve_csv(std::span<const CurvePoint> curve) {
  std::string out = "N,efficiency\n";
  for (const auto& p : curve) out += fmt::format("{},{}\n", p.users, format_fixed(p.efficiency));
  return out;
}

std::string simulation_csv(std::span<const std::pair<std::uint64_t, AggregateStats>> rows) {
  auto se = [](const Estimate& e) { return e.standard_error ? format_fixed(*e.standard_error) : std::string(); };
  std::string out =
      "N,mean_singles,mean_perceived,mean_phantoms,efficiency,se_efficiency,"
      "se_singles,se_perceived,se_phantoms,efficiency_per_trial,se_efficiency_per_trial,trials\n";
  for (const auto& [n, s] : rows) {
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}\n", n, format_fixed(s.singles.mean),
                       format_fixed(s.perceived.mean), format_fixed(s.phantoms.mean),
                       format_fixed(s.efficiency.mean), se(s.efficiency), se(s.singles), se(s.perceived),
                       se(s.phantoms), format_fixed(s.efficiency_per_trial.mean), se(s.efficiency_per_trial),
                       s.trials);
  }
  return out;
}

std::string schedule_csv(const ThresholdSchedule& schedule) {
  std::string out = "N_low,N_high,mode,budgets,cardinality,efficiency_low,efficiency_high\n";
  for (const auto& seg : schedule.segments) {
    std::string budgets;
    for (std::size_t j = 0; j < seg.spec.budgets().size(); ++j) {
      budgets += (j ? " " : "") + std::to_string(seg.spec.budgets()[j]);
    }
    out += fmt::format("{},{},{},{},{},{},{}\n", seg.low, seg.high, to_string(seg.spec.mode()), budgets,
                       seg.cardinality, format_fixed(seg.efficiency_low), format_fixed(seg.efficiency_high));
  }
  return out;
}

std::string chain_dump_csv(const TransitionModel& model) {
  const auto& space = model.space();
  const auto L = space.frame_length();
  std::string out = "state_id";
  for (std::uint32_t j = 1; j <= L; ++j) out += fmt::format(",C_{}", j);
  out += ",cardinality,initial,transitions\n";
  const auto& fwd = model.forward();
  for (std::size_t i = 0; i < space.size(); ++i) {
    out += std::to_string(i + 1);
    for (auto c : space.counts(i)) out += fmt::format(",{}", c);
    out += fmt::format(",{},{},", space.cardinality(i), to_string(model.initial_probability(i)));
    for (auto k = fwd.offsets[i]; k < fwd.offsets[i + 1]; ++k) {
      out += fmt::format("{}{}:{}", k == fwd.offsets[i] ? "" : " ", fwd.indices[k] + 1, fwd.counts[k]);
    }
    out += '\n';
  }
  return out;
}

std::string svg_plot(std::span<const SvgSeries> series, const SvgOptions& options) {
  constexpr double width = 800, height = 500, left = 70, right = 200, top = 40, bottom = 60;
  constexpr std::string_view palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  double x_min = 0, x_max = 1;
  bool first = true;
  for (const auto& s : series) {
    for (const auto& p : s.points) {
      const double x = static_cast<double>(p.users);
      x_min = first ? x : std::min(x_min, x);
      x_max = first ? x : std::max(x_max, x);
      first = false;
    }
  }
  auto fx = [&](double x) { return options.log_x ? std::log10(std::max(x, 1.0)) : x; };
  const double lo = fx(x_min);
  const double hi = fx(x_max) > lo ? fx(x_max) : lo + 1;
  const double plot_w = width - left - right, plot_h = height - top - bottom;
  auto sx = [&](double x) { return left + (fx(x) - lo) / (hi - lo) * plot_w; };
  auto sy = [&](double y) { return top + (1.0 - std::clamp(y, 0.0, 1.0)) * plot_h; };

  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" font-family=\"sans-serif\" "
      "font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
      width, height);
  out += fmt::format("<text x=\"{}\" y=\"22\" font-size=\"15\">{}</text>\n", left, options.title);
  out += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", left,
                     top, plot_w, plot_h);
  for (int k = 0; k <= 5; ++k) {
    const double y = k / 5.0;
    out += fmt::format("<line x1=\"{0}\" x2=\"{1}\" y1=\"{2:.1f}\" y2=\"{2:.1f}\" stroke=\"#ddd\"/>"
                       "<text x=\"{3}\" y=\"{4:.1f}\" text-anchor=\"end\">{5:.1f}</text>\n",
                       left, left + plot_w, sy(y), left - 6, sy(y) + 4, y);
  }
  for (int k = 0; k <= 5; ++k) {
    const double t = lo + (hi - lo) * k / 5.0;
    const double x = options.log_x ? std::pow(10.0, t) : t;
    out += fmt::format("<text x=\"{:.1f}\" y=\"{}\" text-anchor=\"middle\">{:.0f}</text>\n", sx(x),
                       top + plot_h + 18, x);
  }
  out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}{}</text>\n", left + plot_w / 2,
                     height - 15, options.x_label, options.log_x ? " (log scale)" : "");
  out += fmt::format("<text x=\"18\" y=\"{}\" transform=\"rotate(-90 18 {})\" text-anchor=\"middle\">{}</text>\n",
                     top + plot_h / 2, top + plot_h / 2, options.y_label);
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto colour = palette[i % std::size(palette)];
    out += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"", colour);
    for (const auto& p : series[i].points) {
      out += fmt::format("{:.2f},{:.2f} ", sx(static_cast<double>(p.users)), sy(p.efficiency));
    }
    out += "\"/>\n";
    const double ly = top + 14.0 * static_cast<double>(i) + 8;
    out += fmt::format("<line x1=\"{0}\" x2=\"{1}\" y1=\"{2}\" y2=\"{2}\" stroke=\"{3}\" stroke-width=\"2\"/>"
                       "<text x=\"{4}\" y=\"{5}\">{6}</text>\n",
                       left + plot_w + 10, left + plot_w + 30, ly, colour, left + plot_w + 35, ly + 4,
                       series[i].label);
  }
  out += "</svg>\n";
  return out;
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json doc = {{"command", command},
                        {"parameters", parameters},
                        {"tool_version", std::string(kToolVersion)},
                        {"outputs", outputs},
                        {"wall_clock_seconds", wall_clock.count()}};
  doc["master_seed"] = master_seed ? nlohmann::json(*master_seed) : nlohmann::json(nullptr);
  return doc;
}

}  // namespace cera
