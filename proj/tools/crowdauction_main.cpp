// Copyright 2026 The crowdauction Authors
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

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "crowdauction/config.hpp"
#include "crowdauction/errors.hpp"
#include "crowdauction/mechanism.hpp"
#include "crowdauction/payment.hpp"
#include "crowdauction/simulation.hpp"
#include "crowdauction/strategy.hpp"

namespace ca = crowdauction;
using nlohmann::json;

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return std::string(buf);
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) ca::raise(ca::errc::config, "cannot open output file '" + path + "'");
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  if (out.empty()) ca::raise(ca::errc::config, "empty list '" + text + "'");
  return out;
}

std::vector<ca::Exponent> parse_exponent_list(const std::string& text) {
  std::vector<ca::Exponent> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(ca::exponent_from_string(item));
  }
  if (out.empty()) ca::raise(ca::errc::config, "empty k grid '" + text + "'");
  return out;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name, bool required = true) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    if (required) ca::raise(ca::errc::config, "missing CSV column '" + name + "'");
    return -1;
  }
  double number(std::size_t row, int col) const {
    try {
      return std::stod(rows[row][col]);
    } catch (const std::exception&) {
      ca::raise(ca::errc::config, "bad numeric CSV field '" + rows[row][col] + "'");
    }
  }
};

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) ca::raise(ca::errc::config, "cannot open input file '" + path + "'");
  CsvTable table;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (first) {
      table.header = std::move(fields);
      first = false;
    } else {
      table.rows.push_back(std::move(fields));
    }
  }
  if (first) ca::raise(ca::errc::config, "empty CSV file '" + path + "'");
  return table;
}

struct InstanceInput {
  std::vector<std::string> worker_ids;
  Eigen::ArrayXd bids;
  Eigen::ArrayXd caps;
};

InstanceInput read_instance(const std::string& path) {
  const CsvTable table = read_csv(path);
  const int c_worker = table.column("worker");
  const int c_bid = table.column("bid");
  const int c_cap = table.column("capacity");
  InstanceInput input;
  const auto n = static_cast<Eigen::Index>(table.rows.size());
  input.bids.resize(n);
  input.caps.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    input.worker_ids.push_back(table.rows[i][c_worker]);
    input.bids[i] = table.number(i, c_bid);
    input.caps[i] = table.number(i, c_cap);
  }
  return input;
}

// ---------------------------------------------------------------------------
// dist
// ---------------------------------------------------------------------------

struct DistArgs {
  std::string dist_config;
  ca::DistributionSpec spec;
  int grid = 101;
  std::string quantiles;
  int sample_n = 0;
  std::uint64_t seed = 1;
  std::string out;
};

int run_dist(const DistArgs& args) {
  ca::DistributionSpec spec = args.spec;
  if (!args.dist_config.empty()) {
    std::ifstream in(args.dist_config);
    if (!in) ca::raise(ca::errc::config, "cannot open '" + args.dist_config + "'");
    json j;
    in >> j;
    spec = ca::distribution_from_json(j);
  }
  const ca::BidDistribution dist = spec.build();

  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!args.out.empty()) {
    file = open_output(args.out);
    os = &file;
  }

  if (!args.quantiles.empty()) {
    *os << "q,b\n";
    for (double q : parse_double_list(args.quantiles))
      *os << fmt(q) << "," << fmt(dist.quantile(q)) << "\n";
  } else if (args.sample_n > 0) {
    *os << "draw\n";
    const Eigen::ArrayXd draws = dist.sample(args.seed, args.sample_n);
    for (Eigen::Index i = 0; i < draws.size(); ++i) *os << fmt(draws[i]) << "\n";
  } else {
    *os << "b,pdf,cdf,delta\n";
    const double h = (dist.upper() - dist.lower()) / (args.grid + 1);
    for (int i = 1; i <= args.grid; ++i) {
      const double b = dist.lower() + i * h;
      *os << fmt(b) << "," << fmt(dist.pdf(b)) << "," << fmt(dist.cdf(b)) << ","
          << fmt(dist.virtual_welfare(b)) << "\n";
    }
  }
  if (!args.out.empty()) {
    const json summary{{"lower", dist.lower()},
                       {"upper", dist.upper()},
                       {"regular", dist.check_regularity(512)}};
    std::cout << summary.dump() << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// allocate / pay / auction
// ---------------------------------------------------------------------------

struct RoundArgs {
  std::string bids_file;
  std::string k_text = "1";
  double work_total = 0.0;
  std::string dist_config;
  std::string out = "allocation.csv";
  std::string submissions_file;  // auction only
  std::string out_settlement = "settlement.csv";
};

ca::BidDistribution load_dist(const std::string& dist_config) {
  if (dist_config.empty()) return ca::DistributionSpec{}.build();
  std::ifstream in(dist_config);
  if (!in) ca::raise(ca::errc::config, "cannot open '" + dist_config + "'");
  json j;
  in >> j;
  return ca::distribution_from_json(j).build();
}

int run_allocate(const RoundArgs& args) {
  const ca::BidDistribution dist = load_dist(args.dist_config);
  const InstanceInput input = read_instance(args.bids_file);
  const ca::AuctionInstance inst = ca::AuctionInstance::from_bids(
      dist, input.bids, input.caps, ca::exponent_from_string(args.k_text),
      args.work_total);
  const ca::AllocationResult res = ca::solve(inst);

  std::ofstream out = open_output(args.out);
  out << "worker,x,tight,lambda\n";
  for (int i = 0; i < inst.size(); ++i) {
    out << input.worker_ids[i] << "," << fmt(res.x[i]) << ","
        << (res.is_tight(i) ? 1 : 0) << "," << fmt(res.lambda[i]) << "\n";
  }
  const json summary{{"objective", res.objective},
                     {"mu", res.mu},
                     {"iterations", res.iterations}};
  std::cout << summary.dump() << "\n";
  return 0;
}

int run_pay(const RoundArgs& args) {
  const ca::BidDistribution dist = load_dist(args.dist_config);
  const InstanceInput input = read_instance(args.bids_file);
  const ca::AuctionInstance inst = ca::AuctionInstance::from_bids(
      dist, input.bids, input.caps, ca::exponent_from_string(args.k_text),
      args.work_total);
  const ca::AllocationResult res = ca::solve(inst);
  const ca::PaymentSchedule sched = ca::payment_schedule(inst, dist);

  std::ofstream out = open_output(args.out);
  out << "worker,x,p,p_error\n";
  for (int i = 0; i < inst.size(); ++i) {
    out << input.worker_ids[i] << "," << fmt(res.x[i]) << "," << fmt(sched.pay[i])
        << "," << fmt(sched.error_estimate[i]) << "\n";
  }
  const json summary{{"total_pay", sched.pay.sum()},
                     {"total_virtual_cost", ca::total_virtual_cost(inst, res)}};
  std::cout << summary.dump() << "\n";
  return 0;
}

int run_auction(const RoundArgs& args) {
  const ca::BidDistribution dist = load_dist(args.dist_config);
  const InstanceInput input = read_instance(args.bids_file);
  const ca::Stage1Result stage1 =
      ca::run_stage1(input.bids, input.caps, ca::exponent_from_string(args.k_text),
                     args.work_total, dist);

  std::ofstream out = open_output(args.out);
  out << "worker,bid,capacity,x,p\n";
  for (int i = 0; i < stage1.instance.size(); ++i) {
    out << input.worker_ids[i] << "," << fmt(stage1.instance.bids[i]) << ","
        << fmt(stage1.instance.caps[i]) << "," << fmt(stage1.allocation.x[i]) << ","
        << fmt(stage1.payments.pay[i]) << "\n";
  }

  json summary{{"workers", stage1.instance.size()},
               {"total_pay", stage1.payments.pay.sum()},
               {"iterations", stage1.allocation.iterations}};

  if (!args.submissions_file.empty()) {
    const CsvTable table = read_csv(args.submissions_file);
    const int c_worker = table.column("worker");
    const int c_xhat = table.column("x_hat");
    const int c_alpha = table.column("alpha");
    const int c_v = table.column("v", false);
    const int c_xmax = table.column("x_max", false);
    const int c_beta = table.column("beta", false);
    const bool with_profiles = c_v >= 0 && c_xmax >= 0 && c_beta >= 0;
    if (static_cast<int>(table.rows.size()) != stage1.instance.size())
      ca::raise(ca::errc::config, "submission rows must match the stage-1 workers");

    std::map<std::string, int> by_id;
    for (int i = 0; i < stage1.instance.size(); ++i) by_id[input.worker_ids[i]] = i;

    std::vector<ca::WorkSubmission> submissions(stage1.instance.size());
    std::vector<ca::WorkerProfile> profiles(stage1.instance.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      const auto it = by_id.find(table.rows[r][c_worker]);
      if (it == by_id.end())
        ca::raise(ca::errc::config, "unknown worker '" + table.rows[r][c_worker] + "'");
      const int i = it->second;
      submissions[i] = {table.number(r, c_xhat), table.number(r, c_alpha)};
      if (with_profiles) {
        profiles[i] = {table.number(r, c_v), table.number(r, c_xmax),
                       table.number(r, c_beta), 0.0};
      }
    }
    const auto records =
        ca::run_stage2(stage1, submissions, with_profiles ? &profiles : nullptr);

    std::ofstream settle = open_output(args.out_settlement);
    settle << "worker,x,p,x_hat,x_tilde,p_tilde,utility\n";
    for (int i = 0; i < stage1.instance.size(); ++i) {
      const ca::SettlementEntry& rec = records[i];
      settle << input.worker_ids[i] << "," << fmt(rec.assigned) << ","
             << fmt(rec.max_pay) << "," << fmt(rec.submitted) << ","
             << fmt(rec.accepted) << "," << fmt(rec.pay) << ","
             << (rec.utility ? fmt(*rec.utility) : std::string()) << "\n";
    }
    summary["realized_pay_total"] = [&] {
      double s = 0.0;
      for (const auto& r : records) s += r.pay;
      return s;
    }();
  }
  std::cout << summary.dump() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

struct VerifyArgs {
  std::string k_grid = "0,1,2,4,8,inf";
  std::string s_values = "-0.25,-0.5";
  int trials = 100;
  int n_workers = 10;
  double rho = 0.1;
  std::uint64_t seed = 1;
  int threads = 0;
  std::string dist_config;
  std::string out = "departures.csv";
};

int run_verify(const VerifyArgs& args) {
  const ca::BidDistribution dist = load_dist(args.dist_config);
  ca::StudyConfig config;
  config.k_grid = parse_exponent_list(args.k_grid);
  config.slopes = parse_double_list(args.s_values);
  config.trials = args.trials;
  config.n_workers = args.n_workers;
  config.rho = args.rho;
  config.seed = args.seed;
  config.threads = args.threads;

  for (double s : config.slopes) {
    if (s >= 0.0) ca::raise(ca::errc::config, "omega slopes must be negative");
    if (!ca::OmegaSpec{s}.satisfies_capacity_bound())
      std::cerr << "note: slope " << fmt(s)
                << " violates the downweighting bound; departures are expected\n";
  }

  const ca::DepartureReport report = ca::departure_study(config, dist);

  std::ofstream out = open_output(args.out);
  out << "k,s,coordinate,agreement,mean_rel_diff,departures,trials\n";
  static const char* coord_names[3] = {"bid", "xmax", "xhat"};
  for (std::size_t ik = 0; ik < report.k_grid.size(); ++ik) {
    for (std::size_t is = 0; is < report.slopes.size(); ++is) {
      const ca::DepartureCell& cell = report.cell(static_cast<int>(ik), static_cast<int>(is));
      for (int a = 0; a < 3; ++a) {
        out << ca::exponent_to_string(report.k_grid[ik]) << ","
            << fmt(report.slopes[is]) << "," << coord_names[a] << ","
            << fmt(cell.agreement[a]) << "," << fmt(cell.mean_rel_diff[a]) << ","
            << cell.departures[a] << "," << cell.trials << "\n";
      }
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string config_file;
  std::string out_dir = "simout";
  int threads = -1;  // < 0: take the config's value
};

int run_simulate(const SimulateArgs& args) {
  ca::ExperimentConfig config = ca::load_config_file(args.config_file);
  if (args.threads >= 0) config.simulation.threads = args.threads;
  const ca::BidDistribution dist = config.distribution.build();
  if (!dist.check_regularity(512))
    ca::raise(ca::errc::config, "bid prior is irregular");

  const std::filesystem::path dir(args.out_dir);
  std::filesystem::create_directories(dir);

  const ca::FigureTables tables = ca::run_figures(config.simulation, dist);

  {
    std::ofstream out = open_output((dir / "fig2_roi.csv").string());
    out << "n,rho,gamma,k,v1,roi_raw,roi_smoothed\n";
    for (const auto& r : tables.roi)
      out << r.n << "," << fmt(r.rho) << "," << fmt(r.gamma) << ","
          << ca::exponent_to_string(r.k) << "," << fmt(r.v1) << "," << fmt(r.roi_raw)
          << "," << fmt(r.roi_smoothed) << "\n";
  }
  {
    std::ofstream out = open_output((dir / "fig3_participation.csv").string());
    out << "n,rho,gamma,k,participation\n";
    for (const auto& r : tables.participation)
      out << r.n << "," << fmt(r.rho) << "," << fmt(r.gamma) << ","
          << ca::exponent_to_string(r.k) << "," << fmt(r.participation) << "\n";
  }
  {
    std::ofstream out = open_output((dir / "fig4_inflation.csv").string());
    out << "n,rho,k,inflation\n";
    for (const auto& r : tables.inflation)
      out << r.n << "," << fmt(r.rho) << "," << ca::exponent_to_string(r.k) << ","
          << fmt(r.inflation) << "\n";
  }
  {
    std::ofstream out = open_output((dir / "fig5_tradeoff.csv").string());
    out << "n,rho,gamma,k,inflation,participation\n";
    for (const auto& r : tables.tradeoff)
      out << r.n << "," << fmt(r.rho) << "," << fmt(r.gamma) << ","
          << ca::exponent_to_string(r.k) << "," << fmt(r.inflation) << ","
          << fmt(r.participation) << "\n";
  }
  {
    const json echo = ca::config_to_json(config);
    const json manifest{{"seed", config.simulation.seed},
                        {"config_hash", ca::config_hash(echo)},
                        {"config", echo},
                        {"outputs",
                         {"fig2_roi.csv", "fig3_participation.csv", "fig4_inflation.csv",
                          "fig5_tradeoff.csv"}}};
    std::ofstream out = open_output((dir / "manifest.json").string());
    out << manifest.dump(2) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-stage reverse-auction toolkit for crowdsourced work"};
  app.require_subcommand(1);

  DistArgs dist_args;
  CLI::App* dist_cmd = app.add_subcommand("dist", "Evaluate a bid prior");
  dist_cmd->add_option("--dist-config", dist_args.dist_config, "Prior spec (JSON)");
  dist_cmd->add_option("--kind", dist_args.spec.kind);
  dist_cmd->add_option("--mu", dist_args.spec.mu);
  dist_cmd->add_option("--sigma", dist_args.spec.sigma);
  dist_cmd->add_option("--bbar", dist_args.spec.bbar);
  dist_cmd->add_option("--lower", dist_args.spec.lower);
  dist_cmd->add_option("--grid", dist_args.grid, "Evaluation grid size");
  dist_cmd->add_option("--quantiles", dist_args.quantiles, "Comma list of probabilities");
  dist_cmd->add_option("--sample", dist_args.sample_n, "Emit this many draws");
  dist_cmd->add_option("--seed", dist_args.seed);
  dist_cmd->add_option("--out", dist_args.out, "Output CSV (default stdout)");

  RoundArgs alloc_args;
  CLI::App* alloc_cmd = app.add_subcommand("allocate", "Solve one allocation round");
  alloc_cmd->add_option("--bids", alloc_args.bids_file, "CSV: worker,bid,capacity")
      ->required();
  alloc_cmd->add_option("--k", alloc_args.k_text, "Exponent (number or 'inf')");
  alloc_cmd->add_option("--c", alloc_args.work_total, "Total work demanded")->required();
  alloc_cmd->add_option("--dist-config", alloc_args.dist_config);
  alloc_cmd->add_option("--out", alloc_args.out);

  RoundArgs pay_args;
  pay_args.out = "payments.csv";
  CLI::App* pay_cmd = app.add_subcommand("pay", "Allocation plus maximum payments");
  pay_cmd->add_option("--bids", pay_args.bids_file)->required();
  pay_cmd->add_option("--k", pay_args.k_text);
  pay_cmd->add_option("--c", pay_args.work_total)->required();
  pay_cmd->add_option("--dist-config", pay_args.dist_config);
  pay_cmd->add_option("--out", pay_args.out);

  RoundArgs auction_args;
  auction_args.out = "stage1.csv";
  CLI::App* auction_cmd = app.add_subcommand("auction", "Run the two-stage mechanism");
  auction_cmd->add_option("--bids", auction_args.bids_file)->required();
  auction_cmd->add_option("--k", auction_args.k_text);
  auction_cmd->add_option("--c", auction_args.work_total)->required();
  auction_cmd->add_option("--dist-config", auction_args.dist_config);
  auction_cmd->add_option("--out", auction_args.out, "Stage-1 CSV");
  auction_cmd->add_option("--submissions", auction_args.submissions_file,
                          "CSV: worker,x_hat,alpha[,v,x_max,beta]");
  auction_cmd->add_option("--out-settlement", auction_args.out_settlement);

  VerifyArgs verify_args;
  CLI::App* verify_cmd =
      app.add_subcommand("verify", "Search for profitable strategy departures");
  verify_cmd->add_option("--k-grid", verify_args.k_grid);
  verify_cmd->add_option("--s-values", verify_args.s_values);
  verify_cmd->add_option("--trials", verify_args.trials);
  verify_cmd->add_option("--n", verify_args.n_workers);
  verify_cmd->add_option("--rho", verify_args.rho);
  verify_cmd->add_option("--seed", verify_args.seed);
  verify_cmd->add_option("--threads", verify_args.threads);
  verify_cmd->add_option("--dist-config", verify_args.dist_config);
  verify_cmd->add_option("--out", verify_args.out);

  SimulateArgs sim_args;
  CLI::App* sim_cmd = app.add_subcommand("simulate", "Monte Carlo figure suite");
  sim_cmd->add_option("--config", sim_args.config_file, "Experiment JSON")->required();
  sim_cmd->add_option("--out", sim_args.out_dir, "Output directory");
  sim_cmd->add_option("--threads", sim_args.threads);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: usage: " << e.what() << "\n";
    std::cerr << app.help();
    return 64;
  }

  try {
    if (dist_cmd->parsed()) return run_dist(dist_args);
    if (alloc_cmd->parsed()) return run_allocate(alloc_args);
    if (pay_cmd->parsed()) return run_pay(pay_args);
    if (auction_cmd->parsed()) return run_auction(auction_args);
    if (verify_cmd->parsed()) return run_verify(verify_args);
    if (sim_cmd->parsed()) return run_simulate(sim_args);
  } catch (const ca::Error& e) {
    std::cerr << "error: " << e.token() << ": " << e.what() << "\n";
    return e.code() == ca::errc::precision ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 1;
  }
  return 64;
}
