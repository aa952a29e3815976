// progle: sparse spectral network embedding
//
// Subcommands:
//   embed     edge list -> embedding file (full pipeline)
//   enhance   propagate an existing embedding through the modulated network
//   evaluate  multi-label node classification protocol on an embedding
//   synth     random regular graph generator
//   bench     timing/memory sweep over synthetic graph scales
//
// Exit codes: 0 ok, 2 parse error, 3 validation/alignment error,
// 4 convergence error, 1 anything else.

#include <sys/resource.h>

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <new>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "progle/config.hpp"
#include "progle/errors.hpp"
#include "progle/eval.hpp"
#include "progle/io.hpp"
#include "progle/pipeline.hpp"
#include "progle/pmi.hpp"
#include "progle/proximity.hpp"
#include "progle/rng.hpp"
#include "progle/spectral.hpp"
#include "progle/synth.hpp"

namespace {

using progle::RunConfig;

void add_model_options(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--dim", cfg.dim, "Embedding dimension d")->capture_default_str();
  cmd->add_option("--order", cfg.order, "Proximity order m")->capture_default_str();
  cmd->add_option("--dropout", cfg.dropout, "Edge dropout ratio eta in [0,1)")
      ->capture_default_str();
  cmd->add_option("--lambda", cfg.lambda, "Negative-noise ratio lambda")->capture_default_str();
  cmd->add_flag("--clamp-negative", cfg.clamp_negative,
                "Drop negative shifted-log entries from the pattern");
  cmd->add_option("--svd-tol", cfg.svd_tol, "Relative residual tolerance of the truncated SVD")
      ->capture_default_str();
}

void add_filter_options(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--mu", cfg.mu, "Band center mu in [0,2]")->capture_default_str();
  cmd->add_option("--theta", cfg.theta, "Bandwidth/decay theta")->capture_default_str();
  cmd->add_option("--cheb-k", cfg.cheb_k, "Chebyshev term count k")->capture_default_str();
  cmd->add_flag("--no-rescale", cfg.no_rescale,
                "Apply the literal spectral operator without containment rescaling");
}

void add_common_options(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--seed", cfg.seed, "RNG seed")->capture_default_str();
  cmd->add_option("--threads", cfg.threads, "Thread cap for numeric kernels")
      ->envname("PROGLE_THREADS")
      ->capture_default_str();
}

void apply_threads(const RunConfig& cfg) {
#ifdef _OPENMP
  omp_set_num_threads(cfg.threads > 0 ? cfg.threads : 1);
#endif
}

void echo_config(const char* cmd, const RunConfig& cfg) {
  std::printf("### command = %s\n", cmd);
  std::printf("### dim = %d\n", cfg.dim);
  std::printf("### order = %d\n", cfg.order);
  std::printf("### dropout = %g\n", cfg.dropout);
  std::printf("### lambda = %g\n", cfg.lambda);
  std::printf("### mu = %g\n", cfg.mu);
  std::printf("### theta = %g\n", cfg.theta);
  std::printf("### cheb-k = %d\n", cfg.cheb_k);
  std::printf("### seed = %llu\n", static_cast<unsigned long long>(cfg.seed));
  std::printf("### clamp-negative = %s\n", cfg.clamp_negative ? "true" : "false");
  std::printf("### no-rescale = %s\n", cfg.no_rescale ? "true" : "false");
  std::printf("### threads = %d\n", cfg.threads);
}

long peak_rss_kb() {
  rusage usage{};
  getrusage(RUSAGE_SELF, &usage);
  return usage.ru_maxrss;
}

progle::LoadedEmbedding load_embedding_any(const std::string& path) {
  if (std::filesystem::exists(path + ".meta.json")) return progle::load_embedding_binary(path);
  return progle::load_embedding_text(path);
}

void write_embedding(const std::string& path, const progle::Embedding& emb,
                     const progle::NodeIdMap& ids, const RunConfig& cfg, bool binary) {
  if (binary)
    progle::save_embedding_binary(path, emb, ids, cfg);
  else
    progle::save_embedding_text(path, emb, ids);
}

int run_embed(const std::string& edge_file, bool weighted, const std::string& out, bool binary,
              const std::string& dump_proximity, const std::string& dump_shifted,
              const RunConfig& cfg) {
  apply_threads(cfg);
  echo_config("embed", cfg);

  const auto t0 = std::chrono::steady_clock::now();
  progle::LoadedGraph loaded = progle::load_edge_list(edge_file, weighted);
  const double load_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  if (loaded.self_loops_dropped > 0)
    std::fprintf(stderr, "note: dropped %lld self-loop line(s)\n",
                 static_cast<long long>(loaded.self_loops_dropped));

  if (!dump_proximity.empty() || !dump_shifted.empty()) {
    const auto prox = progle::build_proximity(loaded.graph, cfg.order, cfg.dropout,
                                              progle::mix_seed(cfg.seed, 0x70));
    if (!dump_proximity.empty()) progle::dump_coordinate(dump_proximity, prox.matrix);
    if (!dump_shifted.empty()) {
      const auto shifted = progle::build_shifted_log(prox, cfg.lambda, cfg.clamp_negative);
      progle::dump_coordinate(dump_shifted, shifted.matrix);
    }
  }

  const progle::EmbedResult result = progle::embed_graph(loaded.graph, cfg);
  write_embedding(out, result.final, loaded.ids, cfg, binary);
  progle::save_node_id_map(out + ".nodemap", loaded.ids);

  std::printf("### nodes = %lld, undirected edges = %lld\n",
              static_cast<long long>(result.stats.nodes),
              static_cast<long long>(result.stats.undirected_edges));
  std::printf("### proximity nnz = %lld (density %.3e)\n",
              static_cast<long long>(result.stats.proximity_nnz),
              static_cast<double>(result.stats.proximity_nnz) /
                  (static_cast<double>(result.stats.nodes) * result.stats.nodes));
  std::printf("### shifted-log nnz = %lld\n",
              static_cast<long long>(result.stats.shifted_log_nnz));
  std::printf("time load:         %10.3f ms\n", load_ms);
  std::printf("time proximity:    %10.3f ms\n", result.timings.proximity_ms);
  std::printf("time shifted-log:  %10.3f ms\n", result.timings.shifted_log_ms);
  std::printf("time factorize:    %10.3f ms\n", result.timings.factorize_ms);
  std::printf("time propagate:    %10.3f ms\n", result.timings.propagate_ms);
  std::printf("time total:        %10.3f ms\n", result.timings.total_ms);
  return 0;
}

int run_enhance(const std::string& edge_file, bool weighted, const std::string& embedding_file,
                const std::string& out, bool binary, const RunConfig& cfg) {
  apply_threads(cfg);
  echo_config("enhance", cfg);

  const progle::LoadedGraph loaded = progle::load_edge_list(edge_file, weighted);
  const progle::LoadedEmbedding external = load_embedding_any(embedding_file);
  const progle::Embedding aligned = progle::align_embedding(external, loaded.ids);

  const auto t0 = std::chrono::steady_clock::now();
  const auto filter = progle::FilterSpec::make(cfg.mu, cfg.theta, cfg.cheb_k);
  const progle::Embedding enhanced =
      progle::enhance(loaded.graph, filter, aligned, !cfg.no_rescale);
  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

  write_embedding(out, enhanced, loaded.ids, cfg, binary);
  std::printf("time propagate: %10.3f ms\n", ms);
  return 0;
}

int run_evaluate(const std::string& embedding_file, const std::string& label_file,
                 std::vector<double> ratios, int trials, double l2, const std::string& out,
                 const RunConfig& cfg) {
  apply_threads(cfg);
  if (ratios.empty()) ratios = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};

  const progle::LoadedEmbedding emb = load_embedding_any(embedding_file);
  const progle::LoadedLabels labels = progle::load_labels(label_file, emb.ids);

  const progle::EvalReport report =
      progle::run_evaluation(emb.embedding.vectors, labels.set, ratios, trials, cfg.seed, l2);

  std::string text = "ratio\ttrial\tmicro\tmacro\n";
  char buf[128];
  for (const auto& row : report.rows) {
    std::snprintf(buf, sizeof buf, "%.2f\t%d\t%.6f\t%.6f\n", row.ratio, row.trial, row.micro,
                  row.macro);
    text += buf;
  }
  text += "# summary: ratio\ttrials\tmicro_mean\tmicro_std\tmacro_mean\tmacro_std\n";
  for (const auto& s : report.summaries) {
    std::snprintf(buf, sizeof buf, "%.2f\t%d\t%.6f\t%.6f\t%.6f\t%.6f\n", s.ratio, s.trials,
                  s.micro_mean, s.micro_std, s.macro_mean, s.macro_std);
    text += buf;
  }
  if (out.empty()) {
    std::fputs(text.c_str(), stdout);
  } else {
    std::FILE* f = std::fopen(out.c_str(), "w");
    if (!f) throw progle::ParseError("cannot open for writing: " + out);
    std::fputs(text.c_str(), f);
    std::fclose(f);
  }
  return 0;
}

int run_synth(long long n, int degree, const std::string& out, const RunConfig& cfg) {
  const progle::SparseGraph g = progle::random_regular_graph(n, degree, cfg.seed);
  progle::save_edge_list(out, g, progle::NodeIdMap::identity(g.n));
  std::printf("wrote %lld nodes, %lld edges to %s\n", static_cast<long long>(g.n),
              static_cast<long long>(g.undirected_edge_count()), out.c_str());
  return 0;
}

int run_bench(const std::vector<long long>& scales, int degree, const RunConfig& cfg) {
  apply_threads(cfg);
  echo_config("bench", cfg);
  std::printf("n\tedges\tsparse_ms\tpropagate_ms\ttotal_ms\tpeak_rss_kb\n");
  for (const auto n : scales) {
    try {
      const progle::SparseGraph g = progle::random_regular_graph(
          n, degree, progle::mix_seed(cfg.seed, static_cast<std::uint64_t>(n)));
      RunConfig scaled = cfg;
      scaled.dim = static_cast<int>(std::min<long long>(cfg.dim, n - 1));
      const progle::EmbedResult r = progle::embed_graph(g, scaled);
      std::printf("%lld\t%lld\t%.1f\t%.1f\t%.1f\t%ld\n", n,
                  static_cast<long long>(r.stats.undirected_edges),
                  r.timings.sparse_embedding_ms(), r.timings.propagate_ms, r.timings.total_ms,
                  peak_rss_kb());
    } catch (const std::bad_alloc&) {
      std::printf("%lld\tOOM\t-\t-\t-\t-\n", n);
    }
    std::fflush(stdout);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"progle: sparse spectral network embedding"};
  app.require_subcommand(1);

  RunConfig cfg;

  // embed
  std::string edge_file, out, dump_proximity, dump_shifted;
  bool weighted = false, binary = false;
  auto* embed = app.add_subcommand("embed", "Learn an embedding from an edge list");
  embed->add_option("edge_file", edge_file, "Input edge list")->required();
  embed->add_option("--out", out, "Output embedding path")->required();
  embed->add_flag("--weighted", weighted, "Read 'u v w' lines with weights");
  embed->add_flag("--binary", binary, "Write raw float64 + JSON sidecar instead of text");
  embed->add_option("--dump-proximity", dump_proximity,
                    "Debug coordinate dump of the proximity matrix");
  embed->add_option("--dump-shifted", dump_shifted,
                    "Debug coordinate dump of the shifted log matrix");
  add_model_options(embed, cfg);
  add_filter_options(embed, cfg);
  add_common_options(embed, cfg);

  // enhance
  std::string enh_edge_file, enh_embedding, enh_out;
  bool enh_weighted = false, enh_binary = false;
  auto* enhance = app.add_subcommand("enhance", "Propagate an external embedding");
  enhance->add_option("edge_file", enh_edge_file, "Input edge list")->required();
  enhance->add_option("embedding_file", enh_embedding, "External embedding")->required();
  enhance->add_option("--out", enh_out, "Output embedding path")->required();
  enhance->add_flag("--weighted", enh_weighted, "Read 'u v w' lines with weights");
  enhance->add_flag("--binary", enh_binary, "Write raw float64 + JSON sidecar instead of text");
  add_filter_options(enhance, cfg);
  add_common_options(enhance, cfg);

  // evaluate
  std::string eval_embedding, eval_labels, eval_out;
  std::vector<double> ratios;
  int trials = 10;
  double l2 = 1.0;
  auto* evaluate = app.add_subcommand("evaluate", "Multi-label classification protocol");
  evaluate->add_option("embedding_file", eval_embedding, "Embedding to evaluate")->required();
  evaluate->add_option("label_file", eval_labels, "Ground-truth labels")->required();
  evaluate->add_option("--ratios", ratios, "Training ratios (default 0.1..0.9)")->delimiter(',');
  evaluate->add_option("--trials", trials, "Trials per ratio")->capture_default_str();
  evaluate->add_option("--l2", l2, "L2 regularization strength")->capture_default_str();
  evaluate->add_option("--out", eval_out, "Report path (stdout if omitted)");
  add_common_options(evaluate, cfg);

  // synth
  long long synth_n = 0;
  int synth_degree = 0;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "Random regular graph");
  synth->add_option("nodes", synth_n, "Node count")->required();
  synth->add_option("degree", synth_degree, "Node degree (even)")->required();
  synth->add_option("--out", synth_out, "Output edge list")->required();
  add_common_options(synth, cfg);

  // bench
  std::vector<long long> scales;
  int bench_degree = 10;
  auto* bench = app.add_subcommand("bench", "Scalability sweep on synthetic regular graphs");
  bench->add_option("--scales", scales, "Node counts, e.g. 1000,10000")
      ->delimiter(',')
      ->required();
  bench->add_option("--degree", bench_degree, "Node degree")->capture_default_str();
  add_model_options(bench, cfg);
  add_filter_options(bench, cfg);
  add_common_options(bench, cfg);

  CLI11_PARSE(app, argc, argv);

  try {
    if (embed->parsed())
      return run_embed(edge_file, weighted, out, binary, dump_proximity, dump_shifted, cfg);
    if (enhance->parsed())
      return run_enhance(enh_edge_file, enh_weighted, enh_embedding, enh_out, enh_binary, cfg);
    if (evaluate->parsed())
      return run_evaluate(eval_embedding, eval_labels, ratios, trials, l2, eval_out, cfg);
    if (synth->parsed()) return run_synth(synth_n, synth_degree, synth_out, cfg);
    if (bench->parsed()) return run_bench(scales, bench_degree, cfg);
  } catch (const progle::ParseError& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    return 2;
  } catch (const progle::ValidationError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return 3;
  } catch (const progle::ConvergenceError& e) {
    std::fprintf(stderr, "convergence error: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
