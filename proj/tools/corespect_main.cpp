// corespect: density-layered clustering enhancement toolkit.
//
// Subcommands: synth, cluster, rank, eval, noise-sweep, fraction-curve,
// diagnose. Every command writes a report JSON validated against the shipped
// schema; errors go to stderr prefixed "error:" with exit codes 2 (config),
// 3 (data), 4 (internal invariant).

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "corespect/corecluster.hpp"
#include "corespect/dataset.hpp"
#include "corespect/density.hpp"
#include "corespect/errors.hpp"
#include "corespect/expansion.hpp"
#include "corespect/flowrank.hpp"
#include "corespect/metrics.hpp"
#include "corespect/neighbors.hpp"
#include "corespect/pipeline.hpp"
#include "corespect/report.hpp"
#include "corespect/synth.hpp"

namespace cs = corespect;
using cs::json;

namespace {

// Options shared by the pipeline-driven commands.
struct PipelineOpts {
  int k = 2;
  std::string algo = "cs-kmeans";
  std::string variant = "lloyd";
  std::string kernel = "umap_local";
  int q = 40, r = 20, t = 20, ell = 10;
  bool q_set = false, r_set = false, t_set = false;
  std::uint64_t seed = 1;
  int n_init = 10, max_iter = 300;
  double tol = 1e-4;
  int gmm_max_iter = 100;
  double gmm_tol = 1e-3, gmm_reg = 1e-6;
};

void add_pipeline_options(CLI::App* cmd, PipelineOpts& o, bool with_algo) {
  if (with_algo)
    cmd->add_option("--algo", o.algo,
                    "kmeans | gmm | cs-kmeans | cs-gmm")
        ->check(CLI::IsMember({"kmeans", "gmm", "cs-kmeans", "cs-gmm"}));
  cmd->add_option("--k", o.k, "number of clusters");
  cmd->add_option("--q", o.q, "density graph neighbors")->each([&](const std::string&) { o.q_set = true; });
  cmd->add_option("--r", o.r, "rank-walk neighbors")->each([&](const std::string&) { o.r_set = true; });
  cmd->add_option("--t", o.t, "expansion neighbors")->each([&](const std::string&) { o.t_set = true; });
  cmd->add_option("--layers", o.ell, "number of density layers");
  cmd->add_option("--kernel", o.kernel,
                  "umap_local | linear | global_gaussian")
      ->check(CLI::IsMember({"umap_local", "linear", "global_gaussian"}));
  cmd->add_option("--core-variant", o.variant, "lloyd | oneshot")
      ->check(CLI::IsMember({"lloyd", "oneshot"}));
  cmd->add_option("--seed", o.seed, "root random seed");
  cmd->add_option("--n-init", o.n_init, "k-means restarts");
  cmd->add_option("--max-iter", o.max_iter, "k-means iteration cap");
  cmd->add_option("--tol", o.tol, "k-means center-shift tolerance");
  cmd->add_option("--gmm-max-iter", o.gmm_max_iter, "EM iteration cap");
  cmd->add_option("--gmm-tol", o.gmm_tol, "EM log-likelihood tolerance");
  cmd->add_option("--gmm-reg", o.gmm_reg, "covariance ridge");
}

// n <= 2000 gets the small preset unless the user pinned values.
void apply_preset(PipelineOpts& o, int n) {
  if (n <= 2000) {
    if (!o.q_set) o.q = 20;
    if (!o.r_set) o.r = 10;
    if (!o.t_set) o.t = 10;
  }
}

cs::CorespectParams to_params(const PipelineOpts& o) {
  cs::CorespectParams p;
  p.k = o.k;
  p.algo = (o.algo == "cs-gmm" || o.algo == "gmm") ? cs::CoreAlgo::gmm
                                                   : cs::CoreAlgo::kmeans;
  p.variant = o.variant == "oneshot" ? cs::CoreVariant::oneshot
                                     : cs::CoreVariant::lloyd;
  p.q = o.q;
  p.r = o.r;
  p.t = o.t;
  p.ell = o.ell;
  p.kernel = cs::kernel_from_string(o.kernel);
  p.seed = o.seed;
  p.km.n_init = o.n_init;
  p.km.max_iter = o.max_iter;
  p.km.tol = o.tol;
  p.gm.max_iter = o.gmm_max_iter;
  p.gm.tol = o.gmm_tol;
  p.gm.reg = o.gmm_reg;
  return p;
}

json pipeline_params_json(const PipelineOpts& o) {
  return json{{"algo", o.algo},       {"k", o.k},
              {"q", o.q},             {"r", o.r},
              {"t", o.t},             {"layers", o.ell},
              {"kernel", o.kernel},   {"core_variant", o.variant},
              {"n_init", o.n_init},   {"max_iter", o.max_iter},
              {"tol", o.tol},         {"gmm_max_iter", o.gmm_max_iter},
              {"gmm_tol", o.gmm_tol}, {"gmm_reg", o.gmm_reg}};
}

struct InputOpts {
  std::string path;
  bool log_normalize = false;
  int pca_dim = 0;
};

void add_input_options(CLI::App* cmd, InputOpts& o) {
  cmd->add_option("--input", o.path, "dataset CSV")->required();
  cmd->add_flag("--log-normalize", o.log_normalize, "apply ln(1+x) first");
  cmd->add_option("--pca-dim", o.pca_dim,
                  "project to this many principal components (0 = off)");
}

cs::Dataset load_input(const InputOpts& o) {
  cs::Dataset ds = cs::load_csv(o.path);
  if (o.log_normalize) cs::log_normalize(ds.points);
  if (o.pca_dim > 0) ds.points = cs::pca_reduce(ds.points, o.pca_dim);
  return ds;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec)
    throw cs::data_error("cannot create output directory '" + dir + "': " +
                         ec.message());
}

void emit_report(json report, const std::string& dir) {
  const std::string err = cs::validate_report(report, cs::builtin_report_schema());
  if (!err.empty())
    throw cs::invariant_error("report failed schema validation: " + err);
  cs::write_json_file(report, dir + "/report.json");
}

bool is_plain(const std::string& algo) {
  return algo == "kmeans" || algo == "gmm";
}

// Runs the requested algorithm (plain or pipeline) and returns labels plus a
// result blob for the report.
struct RunOutput {
  std::vector<int> labels;
  json results;
  cs::StageSeconds seconds;
};

RunOutput run_algo(const cs::Matrix& x, const PipelineOpts& o) {
  if (o.k < 1) throw cs::config_error("k must be >= 1");
  RunOutput out;
  if (is_plain(o.algo)) {
    auto t0 = std::chrono::steady_clock::now();
    if (o.algo == "kmeans") {
      cs::KmeansParams kp;
      kp.k = o.k;
      kp.n_init = o.n_init;
      kp.max_iter = o.max_iter;
      kp.tol = o.tol;
      cs::KmeansResult km = cs::plain_kmeans(x, o.k, o.seed, kp);
      out.labels = km.labels;
      out.results["objective"] = km.objective;
      out.results["iterations"] = km.iterations;
    } else {
      cs::GmmParams gp;
      gp.k = o.k;
      gp.max_iter = o.gmm_max_iter;
      gp.tol = o.gmm_tol;
      gp.reg = o.gmm_reg;
      cs::GmmResult gm = cs::plain_gmm(x, o.k, o.seed, gp);
      out.labels = gm.labels;
      out.results["mean_log_likelihood"] = gm.mean_log_likelihood;
      out.results["iterations"] = gm.iterations;
      out.results["degenerate"] = gm.degenerate;
    }
    out.seconds.core =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    out.results["work_count"] = 0;
    return out;
  }

  cs::CorespectResult res = cs::corespect(x, to_params(o));
  out.labels = std::move(res.labels);
  out.seconds = res.seconds;
  out.results["work_count"] = res.work_count;
  out.results["cdnn_edges"] = res.cdnn_edges;
  out.results["core_size"] = res.core_size;
  out.results["core_objective"] = res.core_objective;
  if (res.gmm_degenerate) out.results["gmm_degenerate"] = true;
  if (res.zero_density > 0)
    out.results["zero_density_points"] = res.zero_density;
  return out;
}

json metrics_json(const std::vector<int>& truth, const std::vector<int>& pred) {
  return json{{"ari", cs::ari(truth, pred)},
              {"nmi", cs::nmi(truth, pred)},
              {"accuracy", cs::best_match_accuracy(truth, pred)}};
}

// --- commands ---------------------------------------------------------------

int cmd_synth(const std::string& kind, cs::LcpdmParams& p,
              const std::string& out_dir) {
  ensure_dir(out_dir);
  cs::SynthDataset sd =
      kind == "entangled" ? cs::gen_entangled(p) : cs::gen_separable(p);
  cs::save_csv(sd.to_dataset(), out_dir + "/data.csv");

  json params{{"kind", kind},         {"k", p.k},
              {"layers", p.ell},      {"dim", p.dim},
              {"rho0", p.rho0},       {"width", p.width},
              {"density-ratio", p.ratio}, {"mu", p.mu},
              {"align", p.align},     {"n-core", p.n_core},
              {"tail-curl", p.tail_curl}};
  json rep = cs::report_envelope("synth", p.seed, params,
                                 static_cast<int>(sd.points.rows()), p.dim);
  rep["results"] = {{"per_layer_counts", sd.per_layer_counts},
                    {"measured_mu", sd.measured_mu},
                    {"measured_align", sd.measured_align},
                    {"files", {"data.csv"}}};
  emit_report(rep, out_dir);
  std::cout << rep.dump(2) << std::endl;
  return 0;
}

int cmd_cluster(const InputOpts& in, PipelineOpts& o,
                const std::string& out_dir) {
  cs::Dataset ds = load_input(in);
  apply_preset(o, ds.n());
  ensure_dir(out_dir);

  RunOutput run = run_algo(ds.points, o);
  cs::save_labels_csv(run.labels, out_dir + "/labels.csv");

  json rep = cs::report_envelope("cluster", o.seed, pipeline_params_json(o),
                                 ds.n(), ds.dim());
  rep["params"]["input"] = in.path;
  rep["params"]["log_normalize"] = in.log_normalize;
  rep["params"]["pca_dim"] = in.pca_dim;
  rep["timings_sec"] = cs::timings_json(run.seconds);
  rep["results"] = run.results;
  rep["results"]["files"] = {"labels.csv"};
  if (!is_plain(o.algo) && o.ell == 1)
    rep["results"]["expansion_skipped"] = true;  // single layer, nothing to do
  if (ds.has_labels()) rep["results"]["metrics"] = metrics_json(ds.labels, run.labels);
  emit_report(rep, out_dir);
  std::cout << rep.dump(2) << std::endl;
  return 0;
}

int cmd_rank(const InputOpts& in, PipelineOpts& o, const std::string& out_dir) {
  cs::Dataset ds = load_input(in);
  apply_preset(o, ds.n());
  ensure_dir(out_dir);

  auto t0 = std::chrono::steady_clock::now();
  cs::KnnResult qnn = cs::knn_exact(ds.points, o.q);
  std::vector<double> pi = cs::rw_density(qnn);
  double density_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  t0 = std::chrono::steady_clock::now();
  cs::FlowRankResult fr = cs::flowrank(ds.points, pi, o.r);
  cs::LayerPartition lp = cs::partition_layers(fr, o.ell);
  double rank_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  std::ofstream out(out_dir + "/ranks.csv");
  if (!out) throw cs::data_error("cannot open ranks.csv for writing");
  out << "index,pi,z,score,layer\n";
  char line[160];
  for (int i = 0; i < ds.n(); ++i) {
    std::snprintf(line, sizeof(line), "%d,%.17g,%.17g,%.17g,%d\n", i, fr.pi[i],
                  fr.z[i], fr.score[i], lp.layer[i]);
    out << line;
  }
  out.close();

  cs::StageSeconds secs;
  secs.density = density_sec;
  secs.flowrank = rank_sec;
  json rep = cs::report_envelope("rank", o.seed, pipeline_params_json(o),
                                 ds.n(), ds.dim());
  rep["timings_sec"] = cs::timings_json(secs);
  json layer_sizes = json::array();
  for (const auto& m : lp.members) layer_sizes.push_back(m.size());
  rep["results"] = {{"files", {"ranks.csv"}}, {"layer_sizes", layer_sizes}};
  emit_report(rep, out_dir);
  std::cout << rep.dump(2) << std::endl;
  return 0;
}

std::vector<int> load_truth(const std::string& path) {
  // Accept either an index,label file or a dataset CSV with a label column.
  std::ifstream probe(path);
  if (!probe) throw cs::data_error("cannot open '" + path + "' for reading");
  std::string header;
  std::getline(probe, header);
  if (!header.empty() && header.back() == '\r') header.pop_back();
  probe.close();
  if (header == "index,label") return cs::load_labels_csv(path);
  cs::Dataset ds = cs::load_csv(path);
  if (!ds.has_labels())
    throw cs::data_error("'" + path + "' carries no labels");
  return ds.labels;
}

int cmd_eval(const std::string& pred_path, const std::string& truth_path) {
  std::vector<int> pred = cs::load_labels_csv(pred_path);
  std::vector<int> truth = load_truth(truth_path);
  if (pred.size() != truth.size())
    throw cs::data_error("eval: prediction and truth sizes differ (" +
                         std::to_string(pred.size()) + " vs " +
                         std::to_string(truth.size()) + ")");
  int k_pred = 0, k_true = 0;
  for (int v : pred) k_pred = std::max(k_pred, v + 1);
  for (int v : truth) k_true = std::max(k_true, v + 1);

  json rep = cs::report_envelope(
      "eval", 0, json{{"pred", pred_path}, {"truth", truth_path}},
      static_cast<int>(pred.size()), 0);
  rep["results"] = metrics_json(truth, pred);
  rep["results"]["k_pred"] = k_pred;
  rep["results"]["k_true"] = k_true;
  std::cout << rep.dump(2) << std::endl;
  return 0;
}

int cmd_noise_sweep(const InputOpts& in, PipelineOpts& o,
                    std::vector<double> sigmas, int reps,
                    const std::string& out_dir) {
  if (is_plain(o.algo))
    throw cs::config_error("noise-sweep: --algo must be cs-kmeans or cs-gmm "
                           "(the plain baseline is implied)");
  if (reps < 1) throw cs::config_error("noise-sweep: --reps must be >= 1");
  if (sigmas.empty()) sigmas = {0.0, 0.1, 0.2, 0.4};
  for (double s : sigmas)
    if (s < 0.0) throw cs::config_error("noise-sweep: sigma must be >= 0");

  cs::Dataset ds = load_input(in);
  if (!ds.has_labels())
    throw cs::data_error("noise-sweep: input needs ground-truth labels");
  apply_preset(o, ds.n());
  ensure_dir(out_dir);

  PipelineOpts plain = o;
  plain.algo = o.algo == "cs-gmm" ? "gmm" : "kmeans";

  cs::Rng root(o.seed);
  json table = json::array();
  std::ofstream csv(out_dir + "/sweep.csv");
  if (!csv) throw cs::data_error("cannot open sweep.csv for writing");
  csv << "sigma,algo,mean_ari,max_abs_dev\n";

  for (std::size_t si = 0; si < sigmas.size(); ++si) {
    std::vector<double> ari_cs, ari_plain;
    for (int rep = 0; rep < reps; ++rep) {
      cs::Matrix noisy = ds.points;
      cs::Rng noise_rng =
          root.split("noise", si * 1000003ULL + static_cast<std::uint64_t>(rep));
      cs::add_gaussian_noise(noisy, sigmas[si], noise_rng);

      // Repetition r runs both algorithms with seed + r, so a sweep row is
      // reproducible as a plain `cluster --seed <seed + r>` run (exactly so
      // at sigma = 0). The noise draw has its own per-cell stream.
      PipelineOpts o_rep = o, p_rep = plain;
      o_rep.seed = o.seed + static_cast<std::uint64_t>(rep);
      p_rep.seed = o_rep.seed;
      ari_cs.push_back(cs::ari(ds.labels, run_algo(noisy, o_rep).labels));
      ari_plain.push_back(cs::ari(ds.labels, run_algo(noisy, p_rep).labels));
    }
    cs::MeanMaxDev mcs = cs::mean_max_dev(ari_cs);
    cs::MeanMaxDev mpl = cs::mean_max_dev(ari_plain);
    char row[160];
    std::snprintf(row, sizeof(row), "%.17g,%s,%.17g,%.17g\n", sigmas[si],
                  o.algo.c_str(), mcs.mean, mcs.max_dev);
    csv << row;
    std::snprintf(row, sizeof(row), "%.17g,%s,%.17g,%.17g\n", sigmas[si],
                  plain.algo.c_str(), mpl.mean, mpl.max_dev);
    csv << row;
    table.push_back({{"sigma", sigmas[si]},
                     {"enhanced", {{"mean", mcs.mean}, {"max_dev", mcs.max_dev}}},
                     {"plain", {{"mean", mpl.mean}, {"max_dev", mpl.max_dev}}},
                     {"margin", mcs.mean - mpl.mean}});
  }
  csv.close();

  json params = pipeline_params_json(o);
  params["sigmas"] = sigmas;
  params["reps"] = reps;
  json rep = cs::report_envelope("noise-sweep", o.seed, params, ds.n(), ds.dim());
  rep["results"] = {{"table", table}, {"files", {"sweep.csv"}}};
  emit_report(rep, out_dir);
  std::cout << rep.dump(2) << std::endl;
  return 0;
}

int cmd_fraction_curve(const InputOpts& in, PipelineOpts& o,
                       const std::string& out_dir) {
  if (is_plain(o.algo))
    throw cs::config_error("fraction-curve: --algo must be cs-kmeans or "
                           "cs-gmm");
  cs::Dataset ds = load_input(in);
  if (!ds.has_labels())
    throw cs::data_error("fraction-curve: input needs ground-truth labels");
  apply_preset(o, ds.n());
  ensure_dir(out_dir);

  cs::CorespectResult full = cs::corespect(ds.points, to_params(o));

  // Reconstruct the core clustering artifacts for prefix expansion.
  const auto& core = full.layer_members[0];
  cs::Matrix core_membership(core.size(), full.membership.cols());
  std::vector<int> core_labels(core.size());
  for (std::size_t i = 0; i < core.size(); ++i) {
    core_membership.row(i) = full.membership.row(core[i]);
    core_labels[i] = full.labels[core[i]];
  }

  PipelineOpts plain = o;
  plain.algo = o.algo == "cs-gmm" ? "gmm" : "kmeans";

  std::ofstream csv(out_dir + "/curve.csv");
  if (!csv) throw cs::data_error("cannot open curve.csv for writing");
  csv << "x,n_points,plain_accuracy,corespect_accuracy\n";
  json curve = json::array();

  std::vector<int> prefix;
  for (int m = 1; m <= o.ell; ++m) {
    for (int idx : full.layer_members[m - 1]) prefix.push_back(idx);
    const double x_frac = static_cast<double>(prefix.size()) / ds.n();

    std::vector<std::vector<int>> prefix_layers(full.layer_members.begin(),
                                                full.layer_members.begin() + m);
    cs::ExpansionResult ex =
        cs::expand(core_membership, core_labels, prefix_layers, full.graph,
                   static_cast<std::size_t>(ds.n()));

    std::vector<int> truth_sub, cs_sub;
    cs::Matrix sub_x(prefix.size(), ds.dim());
    for (std::size_t i = 0; i < prefix.size(); ++i) {
      truth_sub.push_back(ds.labels[prefix[i]]);
      cs_sub.push_back(ex.labels[prefix[i]]);
      sub_x.row(i) = ds.points.row(prefix[i]);
    }
    double acc_cs = cs::best_match_accuracy(truth_sub, cs_sub);

    // Same seed as the pipeline run: at the first block the plain-algo curve
    // is then the exact core clustering, so the two curves share their start.
    PipelineOpts p_rep = plain;
    p_rep.seed = o.seed;
    std::vector<int> plain_labels = run_algo(sub_x, p_rep).labels;
    double acc_plain = cs::best_match_accuracy(truth_sub, plain_labels);

    char row[160];
    std::snprintf(row, sizeof(row), "%.17g,%zu,%.17g,%.17g\n", x_frac,
                  prefix.size(), acc_plain, acc_cs);
    csv << row;
    curve.push_back({{"x", x_frac},
                     {"n_points", prefix.size()},
                     {"plain_accuracy", acc_plain},
                     {"corespect_accuracy", acc_cs}});
  }
  csv.close();

  json rep = cs::report_envelope("fraction-curve", o.seed,
                                 pipeline_params_json(o), ds.n(), ds.dim());
  rep["timings_sec"] = cs::timings_json(full.seconds);
  rep["results"] = {{"curve", curve}, {"files", {"curve.csv"}}};
  emit_report(rep, out_dir);
  std::cout << rep.dump(2) << std::endl;
  return 0;
}

int cmd_diagnose(const InputOpts& in, PipelineOpts& o,
                 const std::string& labels_path, int m_neighbors,
                 const std::string& out_dir) {
  cs::Dataset ds = load_input(in);
  apply_preset(o, ds.n());
  ensure_dir(out_dir);
  if (is_plain(o.algo))
    throw cs::config_error("diagnose: --algo must be cs-kmeans or cs-gmm");

  std::vector<int> labels;
  if (!labels_path.empty())
    labels = cs::load_labels_csv(labels_path);
  else if (ds.has_labels())
    labels = ds.labels;
  else
    throw cs::data_error("diagnose: pass --labels or use a dataset with a "
                         "label column");
  if (static_cast<int>(labels.size()) != ds.n())
    throw cs::data_error("diagnose: label count does not match dataset");

  cs::CorespectResult res = cs::corespect(ds.points, to_params(o));
  PipelineOpts plain = o;
  plain.algo = o.algo == "cs-gmm" ? "gmm" : "kmeans";
  std::vector<int> plain_labels = run_algo(ds.points, plain).labels;

  std::vector<double> agree_euc = cs::nn_label_agreement(
      ds.points, labels, m_neighbors, cs::AgreementMetric::euclidean);
  std::vector<double> agree_path = cs::nn_label_agreement(
      ds.points, labels, m_neighbors, cs::AgreementMetric::cdnn_path,
      &res.graph);

  auto mean_of = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / v.size();
  };
  // Per-layer means expose where agreement decays.
  const int ell = static_cast<int>(res.layer_members.size());
  json per_layer = json::array();
  for (int l = 0; l < ell; ++l) {
    double se = 0.0, sp = 0.0;
    for (int idx : res.layer_members[l]) {
      se += agree_euc[idx];
      sp += agree_path[idx];
    }
    const double cnt = std::max<std::size_t>(res.layer_members[l].size(), 1);
    per_layer.push_back({{"layer", l},
                         {"euclidean", se / cnt},
                         {"cdnn_path", sp / cnt}});
  }

  cs::SubsetObjectiveReport sub = cs::subset_kmeans_objective_report(
      ds.points, plain_labels, res.labels, res.layer_members[0]);

  std::ofstream csv(out_dir + "/agreement.csv");
  if (!csv) throw cs::data_error("cannot open agreement.csv for writing");
  csv << "index,euclidean,cdnn_path,layer\n";
  for (int i = 0; i < ds.n(); ++i) {
    char row[160];
    std::snprintf(row, sizeof(row), "%d,%.17g,%.17g,%d\n", i, agree_euc[i],
                  agree_path[i], res.layer[i]);
    csv << row;
  }
  csv.close();

  json params = pipeline_params_json(o);
  params["m"] = m_neighbors;
  json rep = cs::report_envelope("diagnose", o.seed, params, ds.n(), ds.dim());
  rep["timings_sec"] = cs::timings_json(res.seconds);
  rep["results"] = {
      {"nn_label_agreement",
       {{"euclidean_mean", mean_of(agree_euc)},
        {"cdnn_path_mean", mean_of(agree_path)},
        {"per_layer", per_layer}}},
      {"subset_kmeans_objective",
       {{"core_by_core_labels", sub.core_by_core_labels},
        {"core_by_full_labels", sub.core_by_full_labels},
        {"full_by_core_labels", sub.full_by_core_labels},
        {"full_by_full_labels", sub.full_by_full_labels}}},
      {"files", {"agreement.csv"}}};
  emit_report(rep, out_dir);
  std::cout << rep.dump(2) << std::endl;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"layered density clustering toolkit"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "generate layered synthetic data");
  std::string synth_kind = "separable";
  cs::LcpdmParams sp;
  std::string synth_out = ".";
  synth->add_option("--kind", synth_kind, "separable | entangled")
      ->check(CLI::IsMember({"separable", "entangled"}));
  synth->add_option("--k", sp.k, "clusters");
  synth->add_option("--layers", sp.ell, "layers including the core");
  synth->add_option("--dim", sp.dim, "ambient dimension");
  synth->add_option("--rho0", sp.rho0, "core radius");
  synth->add_option("--width", sp.width, "annulus width");
  synth->add_option("--density-ratio", sp.ratio, "per-layer density decay");
  synth->add_option("--mu", sp.mu, "core separation bound");
  synth->add_option("--align", sp.align, "layer alignment bound");
  synth->add_option("--n-core", sp.n_core, "points per core");
  synth->add_option("--core-sizes", sp.core_sizes,
                    "per-cluster core sizes (comma separated)")
      ->delimiter(',');
  synth->add_option("--tail-curl", sp.tail_curl, "entangled tail sweep");
  synth->add_option("--seed", sp.seed, "random seed");
  synth->add_option("--output-dir", synth_out, "where to write data.csv");

  // cluster
  auto* cluster = app.add_subcommand("cluster", "cluster a dataset");
  InputOpts cl_in;
  PipelineOpts cl_po;
  std::string cl_out = ".";
  add_input_options(cluster, cl_in);
  add_pipeline_options(cluster, cl_po, true);
  cluster->add_option("--output-dir", cl_out, "where to write labels/report");

  // rank
  auto* rank = app.add_subcommand("rank", "emit density ranking");
  InputOpts rk_in;
  PipelineOpts rk_po;
  std::string rk_out = ".";
  add_input_options(rank, rk_in);
  add_pipeline_options(rank, rk_po, false);
  rank->add_option("--output-dir", rk_out, "where to write ranks.csv");

  // eval
  auto* eval = app.add_subcommand("eval", "compare two labelings");
  std::string ev_pred, ev_truth;
  eval->add_option("--pred", ev_pred, "predicted labels CSV")->required();
  eval->add_option("--truth", ev_truth,
                   "truth labels CSV or dataset with label column")
      ->required();

  // noise-sweep
  auto* sweep = app.add_subcommand("noise-sweep",
                                   "enhanced vs plain across noise levels");
  InputOpts ns_in;
  PipelineOpts ns_po;
  std::vector<double> ns_sigmas;
  int ns_reps = 10;
  std::string ns_out = ".";
  add_input_options(sweep, ns_in);
  add_pipeline_options(sweep, ns_po, true);
  sweep->add_option("--sigmas", ns_sigmas, "noise levels (comma separated)")
      ->delimiter(',');
  sweep->add_option("--reps", ns_reps, "repetitions per level");
  sweep->add_option("--output-dir", ns_out, "where to write sweep.csv");

  // fraction-curve
  auto* frac = app.add_subcommand("fraction-curve",
                                  "accuracy vs covered fraction");
  InputOpts fc_in;
  PipelineOpts fc_po;
  std::string fc_out = ".";
  add_input_options(frac, fc_in);
  add_pipeline_options(frac, fc_po, true);
  frac->add_option("--output-dir", fc_out, "where to write curve.csv");

  // diagnose
  auto* diag = app.add_subcommand("diagnose", "agreement and objective "
                                              "diagnostics");
  InputOpts dg_in;
  PipelineOpts dg_po;
  std::string dg_labels, dg_out = ".";
  int dg_m = 10;
  add_input_options(diag, dg_in);
  add_pipeline_options(diag, dg_po, true);
  diag->add_option("--labels", dg_labels, "labeling to diagnose (labels CSV)");
  diag->add_option("--m", dg_m, "neighbors per agreement query");
  diag->add_option("--output-dir", dg_out, "where to write the report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  }

  try {
    if (synth->parsed()) return cmd_synth(synth_kind, sp, synth_out);
    if (cluster->parsed()) return cmd_cluster(cl_in, cl_po, cl_out);
    if (rank->parsed()) return cmd_rank(rk_in, rk_po, rk_out);
    if (eval->parsed()) return cmd_eval(ev_pred, ev_truth);
    if (sweep->parsed())
      return cmd_noise_sweep(ns_in, ns_po, ns_sigmas, ns_reps, ns_out);
    if (frac->parsed()) return cmd_fraction_curve(fc_in, fc_po, fc_out);
    if (diag->parsed())
      return cmd_diagnose(dg_in, dg_po, dg_labels, dg_m, dg_out);
  } catch (const cs::config_error& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  } catch (const cs::data_error& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 3;
  } catch (const cs::invariant_error& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 4;
  }
  return 0;
}
