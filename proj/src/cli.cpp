#include "cera/cli.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include <fmt/core.h>
#include <omp.h>

#include "CLI11.hpp"

#include "cera/analytic.hpp"
#include "cera/errors.hpp"
#include "cera/report.hpp"

namespace cera {
namespace {

using Clock = std::chrono::steady_clock;

// Collects outputs of one run: files under --out, or CSV to stdout and the
// manifest to stderr.
class Sink {
public:
  Sink(std::string out_dir, std::ostream& out, std::ostream& err)
      : dir_(std::move(out_dir)), out_(out), err_(err), start_(Clock::now()) {}

  void emit(const std::string& name, const std::string& content) {
    if (dir_.empty()) {
      out_ << content;
    } else {
      write_atomic(std::filesystem::path(dir_) / name, content);
    }
    manifest.outputs.push_back(name);
  }

  void finish() {
    manifest.wall_clock = Clock::now() - start_;
    const auto text = manifest.to_json().dump(2) + "\n";
    if (dir_.empty()) {
      err_ << text;
    } else {
      write_atomic(std::filesystem::path(dir_) / "manifest.json", text);
    }
  }

  RunManifest manifest;

private:
  std::string dir_;
  std::ostream& out_;
  std::ostream& err_;
  Clock::time_point start_;
};

std::vector<std::uint64_t> default_grid(std::uint64_t codewords) { return make_grid(1, std::max<std::uint64_t>(1, 10 * codewords)); }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidSpec("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct FigureCurve {
  std::string name;
  std::string label;
  std::vector<CurvePoint> points;
};

std::vector<CurvePoint> schedule_envelope(const CandidateSet& set) { return threshold_schedule(set).envelope; }

void run_reproduce(const std::string& figure, const std::string& range, std::uint64_t trials, std::uint64_t seed,
                   Sink& sink) {
  std::vector<FigureCurve> curves;
  SvgOptions svg;
  nlohmann::json params = {{"figure", figure}};
  auto grid_or = [&](std::uint64_t codewords) {
    return range.empty() ? default_grid(codewords) : parse_grid(range);
  };

  if (figure == "comparison") {
    const auto reference = CodebookSpec::uniform(Mode::Reference, 2, 2);
    const auto expanded = CodebookSpec::uniform(Mode::Expanded, 2, 2);
    const auto grid = grid_or(codebook_size(expanded));
    curves.push_back({"reference_analytic", "reference (analytic)", efficiency_curve(reference, grid)});
    curves.push_back({"expanded_analytic", "code-expanded (analytic)", efficiency_curve(expanded, grid)});
    std::vector<CurvePoint> mc;
    for (auto n : grid) {
      const auto stats = run_batch({expanded, n, trials, seed});
      mc.push_back({n, stats.efficiency.mean});
    }
    curves.push_back({"expanded_montecarlo", "code-expanded (Monte Carlo)", std::move(mc)});
    params["L"] = 2;
    params["M"] = 2;
    params["trials"] = trials;
    params["N_range"] = describe_grid(grid);
    sink.manifest.master_seed = seed;
    svg.title = "Reference vs code-expanded random access, L=2, M=2";
  } else if (figure == "adaptive-l2m4" || figure == "adaptive-l4m4") {
    const std::uint32_t L = figure == "adaptive-l2m4" ? 2 : 4;
    const std::uint32_t M = 4;
    const auto grid = grid_or(codebook_size(CodebookSpec::uniform(Mode::Expanded, L, M)));
    const auto set = default_candidates(L, M, M, grid);
    for (const auto& spec : set.candidates) {
      const auto size = codebook_size(spec);
      const bool ref = spec.mode() == Mode::Reference;
      curves.push_back({ref ? "reference" : fmt::format("expanded_A{}", size),
                        ref ? fmt::format("reference A={}", size) : fmt::format("A_e={}", size),
                        efficiency_curve(spec, grid)});
    }
    const auto schedule = threshold_schedule(set);
    curves.push_back({"adaptive", "adaptive envelope", schedule.envelope});
    sink.emit(figure + "_schedule.csv", schedule_csv(schedule));
    params["L"] = L;
    params["M"] = M;
    params["N_range"] = describe_grid(grid);
    svg.title = fmt::format("Adaptive random access, L={}, M={}", L, M);
    svg.log_x = L == 4;
  } else if (figure == "application-l4") {
    const std::uint32_t L = 4, reference_preambles = 32;
    const auto grid = grid_or(codebook_size(CodebookSpec::uniform(Mode::Expanded, L, 4)));
    const auto reference = CodebookSpec::uniform(Mode::Reference, L, reference_preambles);
    curves.push_back({"reference_mr32", "reference M_r=32", efficiency_curve(reference, grid)});
    for (std::uint32_t me : {3U, 4U}) {
      curves.push_back({fmt::format("expanded_me{}", me), fmt::format("code-expanded M_e={}", me),
                        efficiency_curve(CodebookSpec::uniform(Mode::Expanded, L, me), grid)});
      curves.push_back({fmt::format("adaptive_me{}", me), fmt::format("adaptive M_e={}", me),
                        schedule_envelope(default_candidates(L, me, reference_preambles, grid))});
    }
    params["L"] = L;
    params["M_r"] = reference_preambles;
    params["M_e"] = {3, 4};
    params["N_range"] = describe_grid(grid);
    svg.title = "Application example, L=4, M_r=32, M_e in {3,4}";
    svg.log_x = true;
  } else {
    throw InvalidSpec("unknown figure id '" + figure +
                      "' (expected comparison, adaptive-l2m4, adaptive-l4m4, application-l4)");
  }

  std::vector<SvgSeries> series;
  for (auto& c : curves) {
    sink.emit(figure + "_" + c.name + ".csv", curve_csv(c.points));
    series.push_back({c.label, std::move(c.points)});
  }
  sink.emit(figure + ".svg", svg_plot(series, svg));
  sink.manifest.parameters = params;
}

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::Capacity:
      return kExitCapacity;
    case ErrorKind::Parse:
      return kExitParse;
    case ErrorKind::InvalidArgument:
      break;
  }
  return kExitUsage;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Code-expanded random access: analysis, simulation and codebook planning"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(kToolVersion));

  std::string out_dir;
  int threads = 0;
  app.add_option("--out", out_dir, "Write outputs and manifest.json into this directory");
  app.add_option("--threads", threads, "OpenMP threads (0 = runtime default)")->check(CLI::NonNegativeNumber);

  std::string spec_text, range, scenario_path, figure;
  std::uint64_t trials = 100'000, seed = 0, max_states = 10'000;
  bool lumped = false;
  std::uint32_t frame_length = 0, preambles = 0, reference_preambles = 0;
  std::vector<std::string> candidate_texts;

  auto* analyze = app.add_subcommand("analyze", "Analytic efficiency curve of one codebook");
  analyze->add_option("--spec", spec_text, "Inline spec (L=2,m=2,2,mode=expanded) or JSON file")->required();
  analyze->add_option("--n-range", range, "A:B:step (default 1:10*A)");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo contention trials");
  simulate->add_option("scenario", scenario_path, "Scenario JSON {spec, N, trials, master_seed}");
  simulate->add_option("--spec", spec_text, "Inline spec, used without a scenario file");
  simulate->add_option("--n-range", range, "A:B:step");
  simulate->add_option("--trials", trials, "Trials per N");
  simulate->add_option("--seed", seed, "Master seed");

  auto* inspect = app.add_subcommand("inspect-chain", "Dump the observation chain of an expanded codebook");
  inspect->add_option("--spec", spec_text, "Inline spec or JSON file")->required();
  inspect->add_flag("--lumped", lumped, "Dump the sorted-configuration chain (uniform budgets)");
  inspect->add_option("--max-states", max_states, "Refuse larger dumps (exit 3)");

  auto* thresholds = app.add_subcommand("thresholds", "Load thresholds for switching codebooks");
  thresholds->add_option("--L", frame_length, "Sub-frames per virtual frame");
  thresholds->add_option("--M", preambles, "Preambles available to expanded codebooks (M_e)");
  thresholds->add_option("--mr", reference_preambles, "Reference preambles M_r (default M)");
  thresholds->add_option("--candidate", candidate_texts, "Explicit candidate spec (repeatable)");
  thresholds->add_option("--n-range", range, "A:B:step (default 1:10*largest A)");

  auto* reproduce = app.add_subcommand("reproduce", "Figure data as CSV plus an SVG plot");
  reproduce->add_option("figure", figure, "comparison | adaptive-l2m4 | adaptive-l4m4 | application-l4")->required();
  reproduce->add_option("--n-range", range, "Override the figure's load grid");
  reproduce->add_option("--trials", trials, "Monte Carlo trials per N (comparison)");
  reproduce->add_option("--seed", seed, "Master seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  if (threads > 0) omp_set_num_threads(threads);
  if (*reproduce && out_dir.empty()) out_dir = figure;

  try {
    Sink sink(out_dir, out, err);
    if (*analyze) {
      const auto spec = parse_spec(spec_text);
      const auto grid = range.empty() ? default_grid(codebook_size(spec)) : parse_grid(range);
      sink.manifest.command = "analyze";
      sink.manifest.parameters = {{"spec", spec_to_json(spec)}, {"N_range", describe_grid(grid)}};
      sink.emit("analyze.csv", curve_csv(efficiency_curve(spec, grid)));
    } else if (*simulate) {
      Scenario scenario = [&] {
        if (!scenario_path.empty()) {
          if (!spec_text.empty()) throw InvalidSpec("give either a scenario file or --spec, not both");
          return parse_scenario(read_file(scenario_path));
        }
        if (spec_text.empty()) throw InvalidSpec("simulate needs a scenario file or --spec");
        if (trials == 0) throw InvalidSpec("trials must be at least 1");
        auto spec = parse_spec(spec_text);
        auto grid = range.empty() ? std::vector<std::uint64_t>{1} : parse_grid(range);
        return Scenario{std::move(spec), std::move(grid), trials, seed};
      }();
      std::vector<std::pair<std::uint64_t, AggregateStats>> rows;
      for (auto n : scenario.users) rows.emplace_back(n, run_batch({scenario.spec, n, scenario.trials, scenario.master_seed}));
      sink.manifest.command = "simulate";
      sink.manifest.parameters = scenario_to_json(scenario);
      sink.manifest.master_seed = scenario.master_seed;
      sink.emit("simulate.csv", simulation_csv(rows));
    } else if (*inspect) {
      const auto spec = parse_spec(spec_text);
      if (spec.mode() != Mode::Expanded) throw InvalidSpec("inspect-chain needs an expanded spec");
      const auto model = lumped ? build_lumped_model(spec, max_states + 1) : build_transition_model(spec, max_states + 1);
      if (model.size() > max_states) {
        throw StateSpaceTooLarge(fmt::format("{} states exceed the dump limit of {}", model.size(), max_states));
      }
      sink.manifest.command = "inspect-chain";
      sink.manifest.parameters = {{"spec", spec_to_json(spec)}, {"lumped", lumped}};
      sink.emit("chain.csv", chain_dump_csv(model));
    } else if (*thresholds) {
      CandidateSet set;
      nlohmann::json params;
      if (!candidate_texts.empty()) {
        for (const auto& c : candidate_texts) set.candidates.push_back(parse_spec(c));
        std::uint64_t largest = 0;
        for (const auto& c : set.candidates) largest = std::max(largest, codebook_size(c));
        set.load_grid = range.empty() ? default_grid(largest) : parse_grid(range);
        params["candidates"] = nlohmann::json::array();
        for (const auto& c : set.candidates) params["candidates"].push_back(spec_to_json(c));
      } else {
        if (frame_length == 0 || preambles == 0) throw InvalidSpec("thresholds needs --L and --M, or --candidate");
        const auto mr = reference_preambles ? reference_preambles : preambles;
        const auto full = codebook_size(CodebookSpec::uniform(Mode::Expanded, frame_length, preambles));
        const auto grid = range.empty() ? default_grid(std::max<std::uint64_t>(full, std::uint64_t{mr} * frame_length))
                                        : parse_grid(range);
        set = default_candidates(frame_length, preambles, mr, grid);
        params = {{"L", frame_length}, {"M_e", preambles}, {"M_r", mr}};
      }
      params["N_range"] = describe_grid(set.load_grid);
      sink.manifest.command = "thresholds";
      sink.manifest.parameters = params;
      sink.emit("schedule.csv", schedule_csv(threshold_schedule(set)));
    } else if (*reproduce) {
      sink.manifest.command = "reproduce";
      run_reproduce(figure, range, trials, seed, sink);
    }
    sink.finish();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}

}  // namespace cera
