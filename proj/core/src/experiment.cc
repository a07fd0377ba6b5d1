// Copyright 2026 The crowdmech Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "crowdmech/experiment.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "absl/strings/str_cat.h"
#include "crowdmech/coverage.h"
#include "crowdmech/ectai.h"
#include "crowdmech/random.h"

namespace crowdmech {
namespace {

enum Stream : uint64_t {
  kGraphStream = 1,
  kCostStream = 2,
  kDeviatorStream = 3,
  kPeakStream = 4,
  kValueStream = 5,
  kBundleStream = 6,
};

bool IsTier1(Mechanism m) {
  return m == Mechanism::kTenm || m == Mechanism::kNtbfm ||
         m == Mechanism::kPsm;
}

bool IsAuction(Mechanism m) {
  return m == Mechanism::kWipd || m == Mechanism::kGreedy;
}

std::pair<int64_t, int64_t> ValueRange(const ExperimentConfig& c) {
  if (c.value_range) return *c.value_range;
  return IsAuction(c.mechanism) ? std::pair<int64_t, int64_t>{30, 45}
                                : std::pair<int64_t, int64_t>{20, 50};
}

std::pair<double, double> NormalParams(const ExperimentConfig& c) {
  bool peaks = !IsAuction(c.mechanism);
  return {c.mu.value_or(peaks ? 0.6 : 37.0),
          c.sigma.value_or(peaks ? 0.3 : 8.0)};
}

int DeviatorCount(double frac, int n) {
  return static_cast<int>(
      std::min<double>(n, std::ceil(frac * n - 1e-9)));
}

template <typename T>
std::vector<T> DrawDeviators(const std::vector<T>& pool, int k,
                             uint64_t seed) {
  Rng rng(seed);
  std::vector<T> out = rng.Sample(std::span<const T>(pool), k);
  std::sort(out.begin(), out.end());
  return out;
}

void Put(RoundRecord& rec, std::string name, Json value) {
  rec.metrics.emplace_back(std::move(name), std::move(value));
}

// Reviewers in `deviators` report the position of the panel device nearest
// their true peak.
class FavoritePeakSource : public PeakSource {
 public:
  FavoritePeakSource(const PeakSource& base, std::set<NodeId> deviators)
      : base_(base), deviators_(std::move(deviators)) {}

  absl::StatusOr<double> Peak(int batch, NodeId reviewer,
                              std::span<const PanelEntry> panel,
                              Rng& rng) const override {
    absl::StatusOr<double> alpha = base_.Peak(batch, reviewer, panel, rng);
    if (!alpha.ok() || !deviators_.contains(reviewer)) return alpha;
    absl::StatusOr<NodeId> favorite = SelectQuality(panel, *alpha);
    if (!favorite.ok()) return favorite.status();
    for (const PanelEntry& e : panel) {
      if (e.device == *favorite) return e.position;
    }
    return alpha;
  }

 private:
  const PeakSource& base_;
  std::set<NodeId> deviators_;
};

class ExperimentRunner {
 public:
  explicit ExperimentRunner(const ExperimentConfig& config)
      : config_(config) {}

  absl::StatusOr<ExperimentReport> Run() {
    if (absl::Status s = LoadGraph(); !s.ok()) return s;
    ExperimentReport report;
    report.config = config_;
    for (int r = 1; r <= config_.rounds; ++r) {
      absl::Status s;
      if (IsTier1(config_.mechanism)) {
        s = RunTier1(r, report);
      } else if (IsAuction(config_.mechanism)) {
        s = RunAuction(r, report);
      } else {
        s = RunRanking(r, report);
      }
      if (!s.ok()) return s;
    }
    return report;
  }

 private:
  absl::Status LoadGraph() {
    if (IsAuction(config_.mechanism)) return absl::OkStatus();
    if (!config_.graph_path.empty()) {
      absl::StatusOr<SocialGraph> g = LoadEdgeListFile(config_.graph_path);
      if (!g.ok()) return g.status();
      graph_ = *std::move(g);
    } else {
      Rng rng(MixSeed(config_.seed, 0, kGraphStream));
      graph_ = RandomGraph(config_.synthetic_nodes, config_.edge_prob, rng);
    }
    if (!IsTier1(config_.mechanism) &&
        config_.f + config_.g > graph_.num_nodes()) {
      return absl::InvalidArgumentError(
          absl::StrCat("f + g = ", config_.f + config_.g, " exceeds ",
                       graph_.num_nodes(), " devices"));
    }
    return absl::OkStatus();
  }

  absl::StatusOr<NotifierOutcome> RunNotifier(const CoverageOracle& oracle,
                                              const CostProfile& costs,
                                              const Budget& budget) const {
    switch (config_.mechanism) {
      case Mechanism::kTenm: {
        TenmOptions opts;
        opts.delta = config_.delta;
        opts.payment_scale = config_.payment_scale;
        opts.workers = config_.workers;
        return TenmRun(oracle, costs, budget, opts);
      }
      case Mechanism::kNtbfm:
        return Ntbfm(oracle, costs, budget);
      default:
        return Psm(oracle, costs, budget);
    }
  }

  absl::Status RunTier1(int r, ExperimentReport& report) {
    const int n = graph_.num_nodes();
    auto [lo, hi] = ValueRange(config_);
    Rng cost_rng(MixSeed(config_.seed, r, kCostStream));
    std::vector<std::optional<Rational>> truth(n);
    for (int i = 0; i < n; ++i) truth[i] = Rational(cost_rng.UniformInt(lo, hi));
    std::vector<NodeId> nodes(n);
    for (int i = 0; i < n; ++i) nodes[i] = i;
    std::vector<NodeId> deviators =
        DrawDeviators(nodes, DeviatorCount(config_.deviation_frac, n),
                      MixSeed(config_.seed, r, kDeviatorStream));
    std::vector<std::optional<Rational>> reported = truth;
    for (NodeId d : deviators) {
      reported[d] = std::max(Rational(1), *truth[d] - config_.cost_drop);
    }
    absl::StatusOr<CostProfile> true_costs = CostProfile::Create(truth);
    absl::StatusOr<CostProfile> rep_costs = CostProfile::Create(reported);
    if (!true_costs.ok()) return true_costs.status();
    if (!rep_costs.ok()) return rep_costs.status();
    CoverageOracle oracle(graph_);

    for (const Rational& b : config_.budgets) {
      absl::StatusOr<Budget> budget = Budget::Create(b);
      if (!budget.ok()) return budget.status();
      absl::StatusOr<NotifierOutcome> out =
          RunNotifier(oracle, *rep_costs, *budget);
      if (!out.ok()) return out.status();
      RoundRecord rec;
      rec.round = r;
      rec.budget = b;
      if (absl::Status v = ValidateNotifierOutcome(*out, *rep_costs, *budget);
          !v.ok()) {
        rec.violation = std::string(v.message());
      }
      auto utility_of = [&](const NotifierOutcome& o,
                            std::span<const NodeId> who) {
        Rational u(0);
        for (NodeId d : who) {
          auto it = o.payments.find(d);
          if (it != o.payments.end()) u += it->second - true_costs->cost(d);
        }
        return u;
      };
      Put(rec, "winners", out->selected.size());
      Put(rec, "notified", out->notified.size());
      Put(rec, "total_payment", RationalJson(out->TotalPayment()));
      Put(rec, "total_utility", RationalJson(utility_of(*out, out->selected)));
      rec.budget_feasible = out->TotalPayment() <= b;
      if (!deviators.empty()) {
        absl::StatusOr<NotifierOutcome> honest =
            RunNotifier(oracle, *true_costs, *budget);
        if (!honest.ok()) return honest.status();
        Rational dev_u = utility_of(*out, deviators);
        Rational honest_u = utility_of(*honest, deviators);
        Put(rec, "deviators", deviators.size());
        Put(rec, "deviator_utility", RationalJson(dev_u));
        Put(rec, "deviator_truthful_utility", RationalJson(honest_u));
        if (dev_u > honest_u) {
          rec.deviation_witness = Json{
              {"rule", absl::StrCat("lower cost by ",
                                    FormatRational(config_.cost_drop))},
              {"deviator_utility", RationalJson(dev_u)},
              {"truthful_utility", RationalJson(honest_u)}};
        }
      }
      if (config_.timing) Put(rec, "elapsed_ms", out->elapsed_ms);
      report.rounds.push_back(std::move(rec));
    }
    return absl::OkStatus();
  }

  absl::Status RunRanking(int r, ExperimentReport& report) {
    const int n = graph_.num_nodes();
    std::vector<NodeId> devices(n);
    for (int i = 0; i < n; ++i) devices[i] = i;
    const uint64_t round_seed = MixSeed(config_.seed, r, kPeakStream);
    UniformPeakSource uniform;
    auto [mu, sigma] = NormalParams(config_);
    NormalPeakSource normal(mu, sigma);
    const PeakSource& base = config_.dist == Distribution::kUniform
                                 ? static_cast<const PeakSource&>(uniform)
                                 : normal;
    std::vector<NodeId> deviators =
        DrawDeviators(devices, DeviatorCount(config_.deviation_frac, n),
                      MixSeed(config_.seed, r, kDeviatorStream));
    FavoritePeakSource source(base,
                              std::set<NodeId>(deviators.begin(),
                                               deviators.end()));
    RandomBatchPlanner planner;
    RankingOptions opts;
    opts.f = config_.f;
    opts.g = config_.g;
    opts.seed = round_seed;
    opts.workers = config_.workers;
    opts.aggregator = config_.mechanism == Mechanism::kEctai
                          ? Aggregator::kMedian
                          : Aggregator::kMean;
    absl::StatusOr<QualityRanking> ranking =
        RunQualityRanking(devices, source, planner, opts);
    if (!ranking.ok()) return ranking.status();

    RoundRecord rec;
    rec.round = r;
    if (absl::Status v = ValidateRanking(*ranking, devices); !v.ok()) {
      rec.violation = std::string(v.message());
    }
    std::set<NodeId> dev_set(deviators.begin(), deviators.end());
    // Utility is minus the distance between the aggregate and the
    // reviewer's true peak, summed over every report.
    auto utilities = [&](const QualityRanking& q) -> absl::StatusOr<
                                                      std::pair<double, double>> {
      double all = 0.0, dev = 0.0;
      for (const BatchRecord& b : q.batches) {
        for (const PeakReport& rep : b.reports) {
          Rng rng(PeakStreamSeed(round_seed, b.batch, rep.reviewer));
          absl::StatusOr<double> alpha =
              base.Peak(b.batch, rep.reviewer, b.panel, rng);
          if (!alpha.ok()) return alpha.status();
          double u = -ReviewerRegret(*alpha, b.aggregate);
          all += u;
          if (dev_set.contains(rep.reviewer)) dev += u;
        }
      }
      return std::pair<double, double>{all, dev};
    };
    absl::StatusOr<std::pair<double, double>> u = utilities(*ranking);
    if (!u.ok()) return u.status();
    Put(rec, "winners", ranking->ordered.size());
    Put(rec, "total_utility", u->first);
    if (!deviators.empty()) {
      absl::StatusOr<QualityRanking> honest =
          RunQualityRanking(devices, base, planner, opts);
      if (!honest.ok()) return honest.status();
      absl::StatusOr<std::pair<double, double>> hu = utilities(*honest);
      if (!hu.ok()) return hu.status();
      Put(rec, "deviators", deviators.size());
      Put(rec, "deviator_utility", u->second);
      Put(rec, "deviator_truthful_utility", hu->second);
      if (u->second > hu->second) {
        rec.deviation_witness =
            Json{{"rule", "report the favorite device's position"},
                 {"deviator_utility", u->second},
                 {"truthful_utility", hu->second}};
      }
    }
    report.rounds.push_back(std::move(rec));
    return absl::OkStatus();
  }

  absl::Status RunAuction(int r, ExperimentReport& report) {
    const int m = config_.tasks;
    const int n = config_.auction_devices;
    auto [lo, hi] = ValueRange(config_);
    auto [mu, sigma] = NormalParams(config_);
    Rng value_rng(MixSeed(config_.seed, r, kValueStream));
    std::vector<Valuation> truth;
    for (int i = 0; i < n; ++i) {
      std::vector<Rational> values(m);
      for (int t = 0; t < m; ++t) {
        int64_t v = config_.dist == Distribution::kUniform
                        ? value_rng.UniformInt(lo, hi)
                        : std::max<int64_t>(
                              0, std::llround(value_rng.Normal(mu, sigma)));
        values[t] = Rational(v);
      }
      absl::StatusOr<Valuation> v = Valuation::Additive(values);
      if (!v.ok()) return v.status();
      truth.push_back(*std::move(v));
    }
    std::vector<int> indices(n);
    for (int i = 0; i < n; ++i) indices[i] = i;
    std::vector<int> deviators =
        DrawDeviators(indices, DeviatorCount(config_.deviation_frac, n),
                      MixSeed(config_.seed, r, kDeviatorStream));

    RoundRecord rec;
    rec.round = r;
    struct Result {
      std::optional<AuctionOutcome> outcome;
      std::string violation;
    };
    std::vector<TaskSet> bundles(n, 0);
    if (config_.mechanism == Mechanism::kGreedy) {
      Rng bundle_rng(MixSeed(config_.seed, r, kBundleStream));
      std::vector<int> tasks(m);
      for (int t = 0; t < m; ++t) tasks[t] = t;
      for (int i = 0; i < n; ++i) {
        int size = static_cast<int>(bundle_rng.UniformInt(1, std::min(3, m)));
        bundles[i] = TaskSetOf(bundle_rng.Sample(std::span<const int>(tasks),
                                                 size));
      }
    }
    auto run = [&](bool with_deviation) -> absl::StatusOr<Result> {
      Result res;
      if (config_.mechanism == Mechanism::kGreedy) {
        std::vector<BundleBid> bids;
        for (int i = 0; i < n; ++i) {
          Rational bid = truth[i](bundles[i]);
          if (with_deviation &&
              std::binary_search(deviators.begin(), deviators.end(), i)) {
            bid *= config_.inflation;
          }
          bids.push_back({i, bundles[i], bid});
        }
        absl::StatusOr<AuctionOutcome> out = GreedyBaseline(bids, m, n);
        if (!out.ok()) return out.status();
        res.outcome = *std::move(out);
        return res;
      }
      std::vector<Valuation> reported = truth;
      if (with_deviation) {
        for (int d : deviators) reported[d] = truth[d].Scaled(config_.inflation);
      }
      AuctionOptions opts;
      opts.epsilon = config_.epsilon;
      absl::StatusOr<AuctionOutcome> out =
          WipdRun(reported, config_.policy, opts);
      if (!out.ok()) {
        if (out.status().code() != absl::StatusCode::kResourceExhausted) {
          return out.status();
        }
        res.violation = std::string(out.status().message());
        return res;
      }
      if (absl::Status v = ValidateAuctionOutcome(*out, m, config_.epsilon);
          !v.ok()) {
        res.violation = std::string(v.message());
      }
      res.outcome = *std::move(out);
      return res;
    };
    auto utility_of = [&](const AuctionOutcome& o, std::span<const int> who) {
      Rational u(0);
      for (int d : who) {
        u += DeviceUtility(o.payments[d], truth[d](o.allocation[d]),
                           o.allocation[d] != 0);
      }
      return u;
    };
    absl::StatusOr<Result> main = run(true);
    if (!main.ok()) return main.status();
    if (!main->violation.empty()) rec.violation = main->violation;
    Put(rec, "terminated", main->outcome.has_value());
    if (main->outcome) {
      const AuctionOutcome& o = *main->outcome;
      int winners = 0;
      Rational total(0);
      for (int i = 0; i < n; ++i) {
        winners += o.allocation[i] != 0;
        total += o.payments[i];
      }
      Put(rec, "winners", winners);
      Put(rec, "total_payment", RationalJson(total));
      Put(rec, "total_utility", RationalJson(utility_of(o, indices)));
      Put(rec, "auction_rounds", o.rounds);
      if (!deviators.empty()) {
        absl::StatusOr<Result> honest = run(false);
        if (!honest.ok()) return honest.status();
        Put(rec, "deviators", deviators.size());
        Rational dev_u = utility_of(o, deviators);
        Put(rec, "deviator_utility", RationalJson(dev_u));
        if (honest->outcome) {
          Rational honest_u = utility_of(*honest->outcome, deviators);
          Put(rec, "deviator_truthful_utility", RationalJson(honest_u));
          if (dev_u > honest_u) {
            rec.deviation_witness = Json{
                {"rule", absl::StrCat("scale valuation by ",
                                      FormatRational(config_.inflation))},
                {"deviator_utility", RationalJson(dev_u)},
                {"truthful_utility", RationalJson(honest_u)}};
          }
        }
      }
    }
    report.rounds.push_back(std::move(rec));
    return absl::OkStatus();
  }

  const ExperimentConfig& config_;
  SocialGraph graph_;
};

}  // namespace

absl::StatusOr<Mechanism> ParseMechanism(absl::string_view name) {
  static const std::pair<absl::string_view, Mechanism> kNames[] = {
      {"tenm", Mechanism::kTenm},   {"ntbfm", Mechanism::kNtbfm},
      {"psm", Mechanism::kPsm},     {"ectai", Mechanism::kEctai},
      {"avr", Mechanism::kAvr},     {"wipd", Mechanism::kWipd},
      {"greedy", Mechanism::kGreedy}};
  for (const auto& [n, m] : kNames) {
    if (n == name) return m;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown mechanism \"", name, "\""));
}

absl::string_view MechanismName(Mechanism mechanism) {
  switch (mechanism) {
    case Mechanism::kTenm: return "tenm";
    case Mechanism::kNtbfm: return "ntbfm";
    case Mechanism::kPsm: return "psm";
    case Mechanism::kEctai: return "ectai";
    case Mechanism::kAvr: return "avr";
    case Mechanism::kWipd: return "wipd";
    case Mechanism::kGreedy: return "greedy";
  }
  return "unknown";
}

absl::StatusOr<Distribution> ParseDistribution(absl::string_view name) {
  if (name == "uniform") return Distribution::kUniform;
  if (name == "normal") return Distribution::kNormal;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown distribution \"", name,
                   "\" (expected uniform or normal)"));
}

absl::Status ValidateExperimentConfig(const ExperimentConfig& c) {
  if (c.rounds < 1) return absl::InvalidArgumentError("rounds must be >= 1");
  if (!(c.deviation_frac >= 0.0 && c.deviation_frac <= 1.0)) {
    return absl::InvalidArgumentError("deviation fraction must be in [0,1]");
  }
  auto [lo, hi] = ValueRange(c);
  if (lo > hi) return absl::InvalidArgumentError("range needs lo <= hi");
  if (IsTier1(c.mechanism) && lo < 1) {
    return absl::InvalidArgumentError("costs must be >= 1");
  }
  if (lo < 0) return absl::InvalidArgumentError("values must be >= 0");
  if (c.budgets.empty()) return absl::InvalidArgumentError("no budget given");
  for (const Rational& b : c.budgets) {
    if (b <= 0) return absl::InvalidArgumentError("budget must be > 0");
  }
  if (c.delta <= 0) return absl::InvalidArgumentError("delta must be > 0");
  if (c.epsilon <= 0) return absl::InvalidArgumentError("epsilon must be > 0");
  if (c.f < 1 || c.g < 1) return absl::InvalidArgumentError("f, g must be >= 1");
  if (c.tasks < 1 || c.tasks > kMaxDemandTasks) {
    return absl::InvalidArgumentError(
        absl::StrCat("tasks must be in [1, ", kMaxDemandTasks, "]"));
  }
  if (c.auction_devices < 1) {
    return absl::InvalidArgumentError("auction devices must be >= 1");
  }
  if (c.graph_path.empty() &&
      (c.synthetic_nodes < 1 || !(c.edge_prob >= 0 && c.edge_prob <= 1))) {
    return absl::InvalidArgumentError("synthetic graph needs n >= 1, p in [0,1]");
  }
  if (c.sigma && !(*c.sigma >= 0)) {
    return absl::InvalidArgumentError("sigma must be >= 0");
  }
  if (c.inflation <= 0 || c.cost_drop < 0) {
    return absl::InvalidArgumentError("deviation constants must be positive");
  }
  return absl::OkStatus();
}

Json ExperimentConfigJson(const ExperimentConfig& c) {
  Json j;
  j["mechanism"] = std::string(MechanismName(c.mechanism));
  if (!c.graph_path.empty()) {
    j["graph"] = c.graph_path;
  } else if (!IsAuction(c.mechanism)) {
    j["synthetic_nodes"] = c.synthetic_nodes;
    j["edge_prob"] = c.edge_prob;
  }
  j["seed"] = c.seed;
  j["rounds"] = c.rounds;
  auto [lo, hi] = ValueRange(c);
  j[IsTier1(c.mechanism) ? "cost_range" : "value_range"] = {lo, hi};
  j["deviation_frac"] = c.deviation_frac;
  if (IsTier1(c.mechanism)) {
    Json budgets = Json::array();
    for (const Rational& b : c.budgets) budgets.push_back(RationalJson(b));
    j["budgets"] = budgets;
    j["cost_drop"] = RationalJson(c.cost_drop);
    if (c.mechanism == Mechanism::kTenm) {
      j["delta"] = RationalJson(c.delta);
      j["payment_scale"] = c.payment_scale == PaymentScale::kLiteral
                               ? "literal"
                               : "critical-value";
    }
  } else {
    auto [mu, sigma] = NormalParams(c);
    j["dist"] = c.dist == Distribution::kUniform ? "uniform" : "normal";
    if (c.dist == Distribution::kNormal) {
      j["mu"] = mu;
      j["sigma"] = sigma;
    }
  }
  if (c.mechanism == Mechanism::kEctai || c.mechanism == Mechanism::kAvr) {
    j["f"] = c.f;
    j["g"] = c.g;
  }
  if (IsAuction(c.mechanism)) {
    j["tasks"] = c.tasks;
    j["devices"] = c.auction_devices;
    j["inflation"] = RationalJson(c.inflation);
    if (c.mechanism == Mechanism::kWipd) {
      j["epsilon"] = RationalJson(c.epsilon);
      j["policy"] = std::string(DemandPolicyName(c.policy));
    }
  }
  return j;
}

bool ExperimentReport::BudgetFeasible() const {
  for (const RoundRecord& r : rounds) {
    if (r.budget_feasible && !*r.budget_feasible) return false;
  }
  return true;
}

bool ExperimentReport::HasViolation() const {
  for (const RoundRecord& r : rounds) {
    if (r.violation) return true;
  }
  return false;
}

absl::StatusOr<ExperimentReport> RunExperiment(const ExperimentConfig& config) {
  if (absl::Status s = ValidateExperimentConfig(config); !s.ok()) return s;
  return ExperimentRunner(config).Run();
}

Json ExperimentReportJson(const ExperimentReport& report) {
  Json out = ReportEnvelope("experiment", ExperimentConfigJson(report.config));
  Json rounds = Json::array();
  int witnesses = 0, violations = 0;
  for (const RoundRecord& r : report.rounds) {
    Json jr;
    jr["round"] = r.round;
    if (r.budget) jr["budget"] = RationalJson(*r.budget);
    Json metrics = Json::object();
    for (const auto& [name, value] : r.metrics) metrics[name] = value;
    jr["metrics"] = metrics;
    if (r.budget_feasible) jr["budget_feasible"] = *r.budget_feasible;
    if (r.violation) {
      jr["violation"] = *r.violation;
      ++violations;
    }
    if (r.deviation_witness) {
      jr["deviation_witness"] = *r.deviation_witness;
      ++witnesses;
    }
    rounds.push_back(jr);
  }
  out["rounds"] = rounds;
  out["summary"] = {{"budget_feasible", report.BudgetFeasible()},
                    {"violations", violations},
                    {"deviation_witnesses", witnesses}};
  return out;
}

std::vector<MetricRow> ExperimentMetricRows(const ExperimentReport& report) {
  std::vector<MetricRow> rows;
  const std::string mech(MechanismName(report.config.mechanism));
  const bool sweep = report.config.budgets.size() > 1 &&
                     IsTier1(report.config.mechanism);
  for (const RoundRecord& r : report.rounds) {
    std::string suffix =
        sweep && r.budget ? absl::StrCat("@B=", FormatRational(*r.budget)) : "";
    auto add = [&](const std::string& metric, const Json& value) {
      rows.push_back({r.round, mech, metric + suffix,
                      value.is_string() ? value.get<std::string>()
                                        : value.dump()});
    };
    for (const auto& [name, value] : r.metrics) add(name, value);
    if (r.budget_feasible) add("budget_feasible", *r.budget_feasible ? 1 : 0);
    if (r.violation) add("violation", 1);
    if (r.deviation_witness) add("deviation_witness", 1);
  }
  return rows;
}

}  // namespace crowdmech
