// actorgraph: command-line front end for generation, conversion, runs,
// oracle verification, benchmarking and COST reports.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "actorgraph/actorgraph.hpp"

namespace ag = actorgraph;

namespace {

const std::vector<std::string> kVariantNames = {"serial", "basic", "atomic", "pairs", "reduction", "sortdest"};
const std::vector<std::string> kParallelNames = {"basic", "atomic", "pairs", "reduction", "sortdest"};

// Exit code for runtime failures; parse errors exit with 2.
constexpr int kFailure = 1;
constexpr int kUsage = 2;

struct GraphSource {
  std::string path;
  std::string format = "text";
  std::size_t vertices = 1000;
  std::size_t edges = 5000;
  std::uint64_t seed = 1;

  void add_options(CLI::App& cmd) {
    cmd.add_option("--graph", path, "Edge-list file (default: generate a uniform random graph)");
    cmd.add_option("--format", format, "Edge-list format")->check(CLI::IsMember({"text", "binary"}));
    cmd.add_option("--vertices", vertices, "Vertices of the generated graph")->check(CLI::PositiveNumber);
    cmd.add_option("--edges", edges, "Edges of the generated graph");
    cmd.add_option("--seed", seed, "Seed of the generated graph");
  }

  std::string name() const {
    if (!path.empty()) return std::filesystem::path(path).stem().string();
    return "uniform-n" + std::to_string(vertices) + "-m" + std::to_string(edges) + "-s" + std::to_string(seed);
  }

  ag::Graph load() const {
    if (!path.empty()) return ag::build_graph(ag::load_edge_list(path, ag::parse_edge_format(format)));
    return ag::build_graph(ag::generate_uniform(vertices, edges, seed));
  }
};

struct RunConfig {
  GraphSource source;
  std::string algo = "pagerank";
  std::string variant = "serial";
  std::size_t workers = 1;
  std::size_t chunks = 0;
  float alpha = ag::kDefaultAlpha;
  std::size_t iterations = ag::kDefaultIterations;
  std::string trace_path;
  bool apply_on_arrival = false;
  std::string out_path = "result.txt";
};

void add_workers_option(CLI::App& cmd, std::size_t& workers) {
  cmd.add_option("--workers", workers, "Execution units (worker threads)")
      ->check(CLI::PositiveNumber)
      ->envname("ACTORGRAPH_WORKERS");
}

ag::RunOptions run_options(std::size_t chunks, bool apply_on_arrival) {
  ag::RunOptions o;
  o.chunks = chunks;
  o.apply_on_arrival = apply_on_arrival;
  return o;
}

template <class T>
void write_values(const std::string& path, const std::vector<T>& values) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out.precision(9);
  for (const auto& v : values) out << v << '\n';
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

int cmd_run(const RunConfig& cfg) {
  auto g = cfg.source.load();
  if (cfg.algo == "labelprop") g = ag::symmetrize(g);

  ag::RunOptions opts = run_options(cfg.chunks, cfg.apply_on_arrival);
  opts.trace = !cfg.trace_path.empty();
  ag::RunStats stats;
  double seconds = 0.0;
  auto timed = [&](auto&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    auto r = fn();
    seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
  };

  if (cfg.algo == "pagerank") {
    std::vector<float> ranks;
    if (cfg.variant == "serial") {
      ranks = timed([&] { return ag::pagerank_serial(g, cfg.alpha, cfg.iterations); });
      stats.iterations_run = cfg.iterations;
    } else {
      ag::PageRankRun job(g, *ag::parse_variant(cfg.variant), cfg.workers, opts);
      ranks = timed([&] { return job.run(cfg.alpha, cfg.iterations); });
      stats = job.stats();
    }
    write_values(cfg.out_path, ranks);
  } else {
    std::vector<ag::VertexId> labels;
    if (cfg.variant == "serial") {
      auto res = timed([&] { return ag::labelprop_serial_detailed(g); });
      labels = std::move(res.labels);
      stats.iterations_run = res.passes;
    } else {
      ag::LabelPropRun job(g, *ag::parse_variant(cfg.variant), cfg.workers, opts);
      labels = timed([&] { return job.run(); });
      stats = job.stats();
    }
    write_values(cfg.out_path, labels);
  }

  if (opts.trace) {
    std::ofstream tout(cfg.trace_path);
    if (!tout) throw std::runtime_error("cannot write '" + cfg.trace_path + "'");
    ag::write_trace_csv(tout, stats.trace);
  }
  std::cout << "runtime_s " << seconds << "\n";
  std::cout << "iterations_run " << stats.iterations_run << "\n";
  return 0;
}

struct VerifyConfig {
  GraphSource source;
  std::string algo = "pagerank";
  std::vector<std::size_t> workers = {1, 2, 4};
  std::vector<std::string> variants = kParallelNames;
  std::size_t chunks = 0;
  float alpha = ag::kDefaultAlpha;
  std::size_t iterations = ag::kDefaultIterations;
  double tolerance = 1e-4;
  bool apply_on_arrival = false;
  bool inject_fault = false;
};

double relative_error(double got, double want) {
  const double scale = std::fabs(want);
  return scale > 0.0 ? std::fabs(got - want) / scale : std::fabs(got - want);
}

int cmd_verify(const VerifyConfig& cfg) {
  auto g = cfg.source.load();
  const bool pagerank = cfg.algo == "pagerank";
  if (!pagerank) g = ag::symmetrize(g);

  std::vector<float> ref_ranks;
  std::vector<ag::VertexId> ref_labels;
  if (pagerank)
    ref_ranks = ag::pagerank_serial(g, cfg.alpha, cfg.iterations);
  else
    ref_labels = ag::labelprop_serial(g);

  bool all_ok = true;
  for (const auto& name : cfg.variants) {
    const auto variant = *ag::parse_variant(name);
    for (auto w : cfg.workers) {
      auto opts = run_options(cfg.chunks, cfg.apply_on_arrival);
      if (cfg.inject_fault) opts.fault_iteration = pagerank ? (cfg.iterations ? cfg.iterations - 1 : 0) : 0;
      double worst = 0.0;
      std::optional<std::size_t> bad;
      std::string got, want;
      if (pagerank) {
        auto ranks = ag::run_pagerank(g, variant, w, cfg.alpha, cfg.iterations, opts);
        for (std::size_t v = 0; v < ranks.size(); ++v) {
          const double err = relative_error(ranks[v], ref_ranks[v]);
          if (err > worst) worst = err;
          if (err > cfg.tolerance && !bad) {
            bad = v;
            got = std::to_string(ranks[v]);
            want = std::to_string(ref_ranks[v]);
          }
        }
      } else {
        auto labels = ag::run_labelprop(g, variant, w, opts);
        for (std::size_t v = 0; v < labels.size(); ++v) {
          if (labels[v] != ref_labels[v]) {
            worst = std::max(worst, 1.0);
            if (!bad) {
              bad = v;
              got = std::to_string(labels[v]);
              want = std::to_string(ref_labels[v]);
            }
          }
        }
      }
      std::cout << "variant " << name << " workers " << w << " max_deviation " << worst << (bad ? " FAIL" : " ok")
                << "\n";
      if (bad) {
        all_ok = false;
        std::cerr << "mismatch: variant " << name << " workers " << w << " vertex " << *bad << " got " << got
                  << " expected " << want << "\n";
      }
    }
  }
  return all_ok ? 0 : kFailure;
}

struct BenchCliConfig {
  GraphSource source;
  std::string algo = "both";
  std::vector<std::size_t> workers = {1, 2, 4};
  std::vector<std::string> variants = kParallelNames;
  std::size_t chunks = 0;
  std::size_t reps = 3;
  float alpha = ag::kDefaultAlpha;
  std::size_t iterations = ag::kDefaultIterations;
  bool apply_on_arrival = false;
  std::optional<double> time_limit;
  std::string csv_path;
  std::string summary_path;
};

int cmd_bench(const BenchCliConfig& cfg) {
  const auto directed = cfg.source.load();
  const std::string gname = cfg.source.name();
  std::vector<ag::BenchRecord> records;
  std::vector<std::string> algos;
  if (cfg.algo == "both")
    algos = {"pagerank", "labelprop"};
  else
    algos = {cfg.algo};

  for (const auto& algo : algos) {
    const bool pagerank = algo == "pagerank";
    const ag::Graph g = pagerank ? directed : ag::symmetrize(directed);

    ag::BenchConfig serial{algo, "serial", gname, 1, cfg.reps, cfg.time_limit};
    auto add = [&](std::vector<ag::BenchRecord> rs) { records.insert(records.end(), rs.begin(), rs.end()); };
    if (pagerank)
      add(ag::time_run(
          serial, [] { return 0; },
          [&](int) {
            ag::pagerank_serial(g, cfg.alpha, cfg.iterations);
            return cfg.iterations;
          }));
    else
      add(ag::time_run(
          serial, [] { return 0; }, [&](int) { return ag::labelprop_serial_detailed(g).passes; }));

    for (const auto& name : cfg.variants) {
      const auto variant = *ag::parse_variant(name);
      for (auto w : cfg.workers) {
        ag::BenchConfig bc{algo, name, gname, w, cfg.reps, cfg.time_limit};
        auto opts = run_options(cfg.chunks, cfg.apply_on_arrival);
        opts.quiescence_timeout = std::chrono::seconds(600);
        if (pagerank)
          add(ag::time_run(
              bc, [&] { return std::make_unique<ag::PageRankRun>(g, variant, w, opts); },
              [&](std::unique_ptr<ag::PageRankRun>& job) {
                job->run(cfg.alpha, cfg.iterations);
                return job->stats().iterations_run;
              }));
        else
          add(ag::time_run(
              bc, [&] { return std::make_unique<ag::LabelPropRun>(g, variant, w, opts); },
              [&](std::unique_ptr<ag::LabelPropRun>& job) {
                job->run();
                return job->stats().iterations_run;
              }));
      }
    }
  }

  ag::emit_csv(records, cfg.csv_path);
  const auto summary = ag::summarize(records);
  std::cout << ag::summary_csv(summary);
  if (!cfg.summary_path.empty()) {
    std::ofstream out(cfg.summary_path);
    if (!out) throw std::runtime_error("cannot write '" + cfg.summary_path + "'");
    out << ag::summary_csv(summary);
  }
  for (const auto& r : records)
    if (!r.ok()) std::cerr << "failed: " << r.algorithm << " " << r.variant << " workers " << r.workers << ": " << r.status << "\n";
  return 0;
}

int cmd_cost(const std::string& csv_path, bool json, const std::vector<std::string>& only) {
  auto records = ag::read_csv(csv_path);
  if (!only.empty()) {
    std::erase_if(records, [&](const ag::BenchRecord& r) {
      return r.variant != "serial" && std::find(only.begin(), only.end(), r.variant) == only.end();
    });
  }
  const auto reports = ag::cost_from_records(records);
  if (reports.empty()) {
    std::cerr << "no (algorithm, graph) group has both serial and parallel records\n";
    return kFailure;
  }
  if (json) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : reports) arr.push_back(ag::to_json(r));
    std::cout << arr.dump(2) << "\n";
  } else {
    for (const auto& r : reports) std::cout << ag::format_cost_report(r);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"actor-style PageRank and label propagation with COST measurement", "actorgraph"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("generate", "Write a uniform random edge list");
  std::size_t gen_n = 1000, gen_m = 5000;
  std::uint64_t gen_seed = 1;
  std::string gen_out, gen_format = "text";
  gen->add_option("--vertices", gen_n, "Vertex count")->check(CLI::PositiveNumber);
  gen->add_option("--edges", gen_m, "Edge count");
  gen->add_option("--seed", gen_seed, "Generator seed");
  gen->add_option("--out", gen_out, "Output path")->required();
  gen->add_option("--format", gen_format, "Output format")->check(CLI::IsMember({"text", "binary"}));

  auto* conv = app.add_subcommand("convert", "Convert an edge list between text and binary");
  std::string conv_in, conv_out, conv_in_fmt = "text", conv_out_fmt = "binary";
  bool conv_sym = false;
  conv->add_option("--in", conv_in, "Input path")->required();
  conv->add_option("--out", conv_out, "Output path")->required();
  conv->add_option("--in-format", conv_in_fmt, "Input format")->check(CLI::IsMember({"text", "binary"}));
  conv->add_option("--out-format", conv_out_fmt, "Output format")->check(CLI::IsMember({"text", "binary"}));
  conv->add_flag("--symmetrize", conv_sym, "Write the undirected version (CSR order)");

  const std::string variant_help = "Variant: serial, basic, atomic, pairs, reduction or sortdest";

  auto* run = app.add_subcommand("run", "Run one algorithm with one variant");
  RunConfig rc;
  rc.source.add_options(*run);
  run->add_option("--algo", rc.algo, "Algorithm")->check(CLI::IsMember({"pagerank", "labelprop"}));
  run->add_option("--variant", rc.variant, variant_help)->check(CLI::IsMember(kVariantNames));
  add_workers_option(*run, rc.workers);
  run->add_option("--chunks", rc.chunks, "Vertex chunks (default: one per worker)");
  run->add_option("--alpha", rc.alpha, "Damping factor")->check(CLI::Range(0.0, 1.0));
  run->add_option("--iterations", rc.iterations, "PageRank iterations");
  run->add_option("--trace", rc.trace_path, "Write a ts_ns,worker,kind message trace here");
  run->add_flag("--apply-on-arrival", rc.apply_on_arrival, "Apply batches on receipt instead of in sender order");
  run->add_option("--out", rc.out_path, "Result file, one value per line");

  auto* verify = app.add_subcommand("verify", "Check every variant against the serial oracle");
  VerifyConfig vc;
  vc.source.add_options(*verify);
  verify->add_option("--algo", vc.algo, "Algorithm")->check(CLI::IsMember({"pagerank", "labelprop"}));
  verify->add_option("--workers", vc.workers, "Worker counts")->delimiter(',')->check(CLI::PositiveNumber);
  verify->add_option("--variants", vc.variants, "Variants to check")->delimiter(',')->check(CLI::IsMember(kParallelNames));
  verify->add_option("--chunks", vc.chunks, "Vertex chunks (default: one per worker)");
  verify->add_option("--alpha", vc.alpha, "Damping factor")->check(CLI::Range(0.0, 1.0));
  verify->add_option("--iterations", vc.iterations, "PageRank iterations");
  verify->add_option("--tolerance", vc.tolerance, "Per-vertex relative tolerance for ranks");
  verify->add_flag("--apply-on-arrival", vc.apply_on_arrival, "Apply batches on receipt");
  verify->add_flag("--inject-fault", vc.inject_fault, "Drop one vertex's contributions (self-test)");

  auto* bench = app.add_subcommand("bench", "Time serial and parallel runs over a worker sweep");
  BenchCliConfig bcfg;
  double time_limit = 0.0;
  bcfg.source.add_options(*bench);
  bench->add_option("--algo", bcfg.algo, "Algorithm")->check(CLI::IsMember({"pagerank", "labelprop", "both"}));
  bench->add_option("--workers", bcfg.workers, "Worker counts")->delimiter(',')->check(CLI::PositiveNumber);
  bench->add_option("--variants", bcfg.variants, "Variants to time")->delimiter(',')->check(CLI::IsMember(kParallelNames));
  bench->add_option("--chunks", bcfg.chunks, "Vertex chunks (default: one per worker)");
  bench->add_option("--reps", bcfg.reps, "Repetitions per configuration")->check(CLI::PositiveNumber);
  bench->add_option("--alpha", bcfg.alpha, "Damping factor")->check(CLI::Range(0.0, 1.0));
  bench->add_option("--iterations", bcfg.iterations, "PageRank iterations");
  bench->add_flag("--apply-on-arrival", bcfg.apply_on_arrival, "Apply batches on receipt");
  bench->add_option("--time-limit", time_limit, "Mark runs slower than this many seconds as failed");
  bench->add_option("--csv", bcfg.csv_path, "Output CSV")->required();
  bench->add_option("--summary", bcfg.summary_path, "Also write min/mean/stddev per configuration here");

  auto* cost = app.add_subcommand("cost", "Compute COST from a bench CSV");
  std::string cost_csv;
  bool cost_json = false;
  std::vector<std::string> cost_only;
  cost->add_option("--csv", cost_csv, "Bench CSV")->required();
  cost->add_flag("--json", cost_json, "Emit machine-readable JSON");
  cost->add_option("--variants", cost_only, "Only consider these non-serial variants")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n";
    const CLI::App* where = &app;
    for (const auto* sub : app.get_subcommands()) where = sub;
    std::cerr << where->help();
    return kUsage;
  }

  try {
    if (*gen) {
      ag::save_edge_list(gen_out, ag::generate_uniform(gen_n, gen_m, gen_seed), ag::parse_edge_format(gen_format));
      return 0;
    }
    if (*conv) {
      auto list = ag::load_edge_list(conv_in, ag::parse_edge_format(conv_in_fmt));
      if (conv_sym) {
        ag::EdgeList sym;
        auto g = ag::symmetrize(ag::build_graph(list));
        sym.edges = g.edges();
        sym.declared_vertices = g.num_vertices();
        list = std::move(sym);
      }
      ag::save_edge_list(conv_out, list, ag::parse_edge_format(conv_out_fmt));
      return 0;
    }
    if (*run) return cmd_run(rc);
    if (*verify) return cmd_verify(vc);
    if (*bench) {
      if (time_limit > 0.0) bcfg.time_limit = time_limit;
      return cmd_bench(bcfg);
    }
    if (*cost) return cmd_cost(cost_csv, cost_json, cost_only);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}
