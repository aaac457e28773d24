#include "relnav/train/ablation.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace relnav::train {

double median_of(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

namespace {

MetricsReport median_report(const std::vector<MetricsReport>& reports) {
  MetricsReport out;
  auto collect = [&](auto field) {
    std::vector<double> v;
    v.reserve(reports.size());
    for (const auto& r : reports) v.push_back(field(r));
    return median_of(std::move(v));
  };
  out.tl = collect([](const MetricsReport& r) { return r.tl; });
  out.ne = collect([](const MetricsReport& r) { return r.ne; });
  out.sr = collect([](const MetricsReport& r) { return r.sr; });
  out.osr = collect([](const MetricsReport& r) { return r.osr; });
  out.spl = collect([](const MetricsReport& r) { return r.spl; });
  out.rgs = collect([](const MetricsReport& r) { return r.rgs; });
  out.rgspl = collect([](const MetricsReport& r) { return r.rgspl; });
  out.mean_reused_length =
      collect([](const MetricsReport& r) { return r.mean_reused_length; });
  out.episodes = reports.empty() ? 0 : reports.front().episodes;
  return out;
}

}  // namespace

AblationResult run_ablation(const TrainConfig& base, const std::vector<std::uint64_t>& seeds,
                            std::ostream* progress) {
  struct Toggle {
    const char* name;
    bool temporal, spatial, tbp;
  };
  // Relation grid without the penalty, then the penalty with both modules.
  const Toggle toggles[] = {
      {"baseline", false, false, false},
      {"spatial", false, true, false},
      {"temporal", true, false, false},
      {"temporal+spatial", true, true, false},
      {"temporal+spatial+tbp", true, true, true},
  };

  AblationResult result;
  result.seeds = seeds;
  for (const Toggle& t : toggles) {
    AblationRow row;
    row.name = t.name;
    row.temporal = t.temporal;
    row.spatial = t.spatial;
    row.turning_back = t.tbp;
    for (std::uint64_t seed : seeds) {
      TrainConfig cfg = base;
      cfg.seed = seed;
      cfg.temporal_relations = t.temporal;
      cfg.spatial_relations = t.spatial;
      cfg.turning_back_penalty = t.tbp;
      const ExperimentSetup setup = ExperimentSetup::create(cfg);
      TrainResult trained = train(cfg, setup);
      EvalOptions opts;
      opts.episodes_per_env = cfg.eval_episodes_per_env;
      opts.max_steps = cfg.max_steps;
      opts.xi = cfg.xi;
      opts.min_hops = cfg.min_hops;
      opts.max_hops = cfg.max_hops;
      MetricsReport report = evaluate(trained.params, setup.unseen_split, setup.relations.get(),
                                      setup.vocab, cfg.model_config(), opts);
      if (progress) {
        (*progress) << row.name << "  seed " << seed << "  " << report.summary_line() << "\n";
      }
      row.per_seed.push_back(std::move(report));
    }
    row.median = median_report(row.per_seed);
    result.rows.push_back(std::move(row));
  }
  return result;
}

std::string AblationResult::to_csv() const {
  std::ostringstream out;
  out << "name,temporal,spatial,turning_back,seed,tl,ne,sr,osr,spl,rgs,rgspl,"
         "mean_reused_length\n";
  for (const AblationRow& row : rows) {
    for (std::size_t i = 0; i < row.per_seed.size(); ++i) {
      const MetricsReport& r = row.per_seed[i];
      out << row.name << ',' << row.temporal << ',' << row.spatial << ',' << row.turning_back
          << ',' << seeds[i] << ',' << r.tl << ',' << r.ne << ',' << r.sr << ',' << r.osr << ','
          << r.spl << ',' << r.rgs << ',' << r.rgspl << ',' << r.mean_reused_length << '\n';
    }
    const MetricsReport& m = row.median;
    out << row.name << ',' << row.temporal << ',' << row.spatial << ',' << row.turning_back
        << ",median," << m.tl << ',' << m.ne << ',' << m.sr << ',' << m.osr << ',' << m.spl
        << ',' << m.rgs << ',' << m.rgspl << ',' << m.mean_reused_length << '\n';
  }
  return out.str();
}

std::string AblationResult::table() const {
  std::ostringstream out;
  out << std::fixed << std::setprecision(3);
  out << std::left << std::setw(24) << "configuration" << std::right << std::setw(8) << "TL"
      << std::setw(8) << "NE" << std::setw(8) << "SR" << std::setw(8) << "OSR" << std::setw(8)
      << "SPL" << std::setw(8) << "RGS" << std::setw(8) << "RGSPL" << "\n";
  for (const AblationRow& row : rows) {
    const MetricsReport& m = row.median;
    out << std::left << std::setw(24) << row.name << std::right << std::setw(8) << m.tl
        << std::setw(8) << m.ne << std::setw(8) << m.sr << std::setw(8) << m.osr << std::setw(8)
        << m.spl << std::setw(8) << m.rgs << std::setw(8) << m.rgspl << "\n";
  }
  return out.str();
}

}  // namespace relnav::train
