// ajb: command-line front end for training and evaluating binary codes.
//
//   ajb convert   --input a.fvecs --output a.txt
//   ajb train     --input train.fvecs --bits 32 --out model.ajb
//   ajb encode    --model model.ajb --input base.fvecs --out base.ajbc
//   ajb eval      --model model.ajb --base base.fvecs --query query.fvecs --out-prefix run/ajb
//   ajb gradcheck --method cautobin
//   ajb toy       --out-dir toy/
//   ajb plot      --input run/ajb.k10.recall.csv --input run/lsh.k10.recall.csv --out recall.svg
//
// Every command accepts --config FILE with key=value lines; flags given on the
// command line take precedence. AJB_THREADS caps worker threads.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "autojacobin/autojacobin.hpp"

#ifndef AUTOJACOBIN_VERSION
#define AUTOJACOBIN_VERSION "dev"
#endif

namespace fs = std::filesystem;
using namespace ajb;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitError = 2;

// --- Run manifest ------------------------------------------------------------

struct RunManifest {
  std::string command;
  std::uint64_t seed = 0;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  nlohmann::ordered_json flags = nlohmann::ordered_json::object();

  void capture_flags(const CLI::App& sub) {
    for (const CLI::Option* opt : sub.get_options()) {
      if (opt->get_lnames().empty()) continue;
      const std::string& name = opt->get_lnames().front();
      if (name == "help" || name == "config") continue;
      if (opt->get_expected_min() == 0) {
        flags[name] = opt->count() > 0;
      } else if (opt->count() > 0) {
        const auto& res = opt->results();
        if (opt->get_items_expected_max() > 1)
          flags[name] = res;
        else
          flags[name] = res.back();
      } else {
        flags[name] = opt->get_default_str();
      }
    }
  }

  void write(const std::string& path) const {
    nlohmann::ordered_json j;
    j["tool"] = "ajb";
    j["version"] = AUTOJACOBIN_VERSION;
    j["command"] = command;
    j["seed"] = seed;
    j["flags"] = flags;
    j["inputs"] = inputs;
    j["outputs"] = outputs;
    write_text_file(path, j.dump(2) + "\n");
  }
};

// --- Config file merge -------------------------------------------------------

// Reads key=value lines (blank lines and '#' comments ignored).
std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file '" + path + "'");
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    if (eq == std::string::npos) {
      if (!trim(line).empty()) throw Error("config: expected key=value, got '" + trim(line) + "'");
      continue;
    }
    std::string key = trim(line.substr(0, eq));
    if (key.rfind("--", 0) == 0) key.erase(0, 2);
    out.emplace_back(key, trim(line.substr(eq + 1)));
  }
  return out;
}

// Inserts config entries as flags right after the subcommand name, skipping
// keys that already appear on the command line.
std::vector<std::string> merge_config_args(const std::vector<std::string>& args) {
  std::string config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
  }
  if (config_path.empty() || args.size() < 2) return args;
  auto given = [&](const std::string& key) {
    const std::string flag = "--" + key;
    return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
  };
  std::vector<std::string> out(args.begin(), args.begin() + 2);
  for (const auto& [key, value] : read_config(config_path)) {
    if (given(key)) continue;
    if (value == "true") {
      out.push_back("--" + key);
    } else if (value != "false") {
      out.push_back("--" + key);
      out.push_back(value);
    }
  }
  out.insert(out.end(), args.begin() + 2, args.end());
  return out;
}

// --- Helpers -----------------------------------------------------------------

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void ensure_parent_dir(const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

std::string stem_of(const std::string& path) {
  std::string s = fs::path(path).filename().string();
  for (const char* ext : {".csv", ".recall", ".trace"})
    if (ends_with(s, ext)) s.erase(s.size() - std::string(ext).size());
  return s;
}

DataMatrix take_columns(const DataMatrix& x, Index limit) {
  if (limit <= 0 || limit >= x.cols()) return x;
  return x.leftCols(limit);
}

// --- convert -----------------------------------------------------------------

struct ConvertArgs {
  std::string input;
  std::string output;
  Index limit = 0;
  std::string synthetic;
  Index count = 1000;
  Index dims = 64;
  Index intrinsic = 8;
  double frequency = 1.5;
  double noise = 0.05;
  std::uint64_t manifold_seed = 1;
  std::uint64_t seed = 1;
};

int run_convert(const ConvertArgs& a, RunManifest& m) {
  DataMatrix x;
  if (!a.synthetic.empty()) {
    Rng rng(a.seed);
    if (a.synthetic == "manifold") {
      ManifoldSpec spec;
      spec.dims = a.dims;
      spec.intrinsic = a.intrinsic;
      spec.frequency = a.frequency;
      spec.noise = a.noise;
      spec.seed = a.manifold_seed;
      x = CurvedManifold(spec).sample(a.count, rng);
    } else if (a.synthetic == "simplex") {
      x = sample_simplex(a.count, rng);
    } else if (a.synthetic == "plane") {
      x = sample_affine(a.dims, a.intrinsic, a.count, a.noise, rng).points;
    } else {
      throw Error("convert: unknown synthetic kind '" + a.synthetic + "'");
    }
  } else {
    if (a.input.empty()) throw Error("convert: need --input or --synthetic");
    x = load_matrix(a.input);
    m.inputs.push_back(a.input);
  }
  x = take_columns(x, a.limit);
  ensure_parent_dir(a.output);
  save_matrix(a.output, x);
  m.outputs.push_back(a.output);
  std::cout << "wrote " << x.cols() << " x " << x.rows() << "-dim vectors to " << a.output << "\n";
  return kExitOk;
}

// --- train -------------------------------------------------------------------

struct TrainArgs {
  std::string input;
  Index bits = 32;
  std::string method = "auto-jacobin";
  double alpha = -1.0;  // method default when negative
  double epsilon = kDefaultEpsilon;
  int epochs = 5;
  Index batch = 1000;
  int max_iterations = 0;
  std::uint64_t seed = 1;
  double corrupt_t = kDautobinDefaultCorruption;
  double lambda_c = kCautobinDefaultLambda;
  std::string out = "model.ajb";
  std::string trace;
  std::string tangent_cache;
  Index train_limit = 0;
  bool unit_step = false;
};

VariantConfig variant_from(const std::string& name, double alpha, double epsilon, double t,
                           double lambda_c, std::uint64_t seed) {
  const auto kind = parse_method(name);
  if (!kind) throw Error("unknown method '" + name + "'");
  VariantConfig v = VariantConfig::defaults(*kind);
  if (alpha >= 0.0) v.alpha = alpha;
  v.epsilon = epsilon;
  v.corruption_t = t;
  v.lambda_c = lambda_c;
  v.seed = seed;
  v.validate();
  return v;
}

std::vector<TangentBasis> load_or_estimate_tangents(const DataMatrix& x, Index bits,
                                                    const std::string& cache, RunManifest& m) {
  if (!cache.empty() && fs::exists(cache)) {
    try {
      auto c = read_tangent_cache(cache);
      if (c.dims == x.rows() && c.bits == bits && static_cast<Index>(c.bases.size()) == x.cols()) {
        m.inputs.push_back(cache);
        std::cout << "loaded tangent cache " << cache << "\n";
        return std::move(c.bases);
      }
      std::cerr << "tangent cache " << cache << " does not match the data; recomputing\n";
    } catch (const Error& e) {
      std::cerr << "ignoring unreadable tangent cache: " << e.what() << "\n";
    }
  }
  auto bases = estimate_all_tangents(x, bits);
  Index degenerate = 0;
  for (const auto& t : bases) degenerate += t.degenerate ? 1 : 0;
  if (degenerate > 0) std::cerr << degenerate << " points have a degenerate neighbourhood\n";
  if (!cache.empty()) {
    ensure_parent_dir(cache);
    write_tangent_cache(cache, bases, x.rows(), bits);
    m.outputs.push_back(cache);
  }
  return bases;
}

int run_train(const TrainArgs& a, RunManifest& m) {
  const VariantConfig method =
      variant_from(a.method, a.alpha, a.epsilon, a.corrupt_t, a.lambda_c, a.seed);
  m.flags["alpha"] = method.alpha;
  const DataMatrix raw = take_columns(load_matrix(a.input), a.train_limit);
  m.inputs.push_back(a.input);
  if (raw.cols() == 0) throw Error("train: no training vectors in '" + a.input + "'");
  const Normalizer nz = fit_normalizer(raw);
  const DataMatrix x = nz.apply(raw);
  const std::string trace_path = a.trace.empty() ? a.out + ".trace.csv" : a.trace;
  ensure_parent_dir(a.out);

  TrainConfig cfg;
  cfg.bits = a.bits;
  cfg.epochs = a.epochs;
  cfg.batch_size = std::min<Index>(a.batch, x.cols());
  if (cfg.batch_size != a.batch)
    std::cerr << "batch size clamped to the training set size " << cfg.batch_size << "\n";
  cfg.max_iterations = a.max_iterations;
  cfg.seed = a.seed;
  cfg.method = method;
  cfg.step_init = a.unit_step ? StepInit::unit : StepInit::adaptive;

  std::vector<TangentBasis> bases;
  JacobianTargets targets;
  if (method.needs_tangents()) {
    if (x.cols() < x.rows() + a.bits)
      throw DimensionError("train: tangent estimation needs N >= D + d = " +
                           std::to_string(x.rows() + a.bits) + " points, have " +
                           std::to_string(x.cols()));
    bases = load_or_estimate_tangents(x, a.bits, a.tangent_cache, m);
    targets = JacobianTargets::from_tangents(bases);
  }

  TrainResult res = train(x, method.needs_tangents() ? &targets : nullptr, cfg);
  res.params.scale = nz.scale;
  write_model(a.out, res.params);
  m.outputs.push_back(a.out);
  write_text_file(trace_path, trace_csv(res.report));
  m.outputs.push_back(trace_path);
  if (method.trains()) {
    const std::string epochs_path = a.out + ".epochs.csv";
    write_text_file(epochs_path, epoch_cost_csv(res.report));
    m.outputs.push_back(epochs_path);
  }

  int fallbacks = 0;
  for (const auto& t : res.report.trace) fallbacks += t.fallback ? 1 : 0;
  std::cout << "method " << method_name(method.kind) << ", D=" << x.rows() << ", d=" << a.bits
            << ", N=" << x.cols() << ", iterations " << res.report.trace.size()
            << ", line-search fallbacks " << fallbacks << "\n";
  if (!res.report.epoch_costs.empty())
    std::cout << "full-set cost " << res.report.epoch_costs.front().parts.total() << " -> "
              << res.report.epoch_costs.back().parts.total() << "\n";
  std::cout << "wrote " << a.out << " (" << res.report.wall_seconds << " s)\n";
  return kExitOk;
}

// --- encode ------------------------------------------------------------------

struct EncodeArgs {
  std::string model;
  std::string input;
  std::string out;
  bool use_bias = false;
};

int run_encode(const EncodeArgs& a, RunManifest& m) {
  const NetworkParams p = read_model(a.model);
  const DataMatrix x = load_matrix(a.input);
  m.inputs = {a.model, a.input};
  const BinaryCodes codes = encode(p, apply_normalizer(Normalizer{p.scale}, x, p.dims()), a.use_bias);
  ensure_parent_dir(a.out);
  write_codes(a.out, codes);
  m.outputs.push_back(a.out);
  std::cout << "encoded " << codes.count() << " points with " << codes.bits() << " bits\n";
  return kExitOk;
}

// --- eval --------------------------------------------------------------------

struct EvalArgs {
  std::string model;
  std::string base;
  std::string query;
  std::vector<Index> ks{1, 5, 10, 50, 100};
  Index max_retrieve = 10000;
  std::string out_prefix = "eval";
  std::string svg;
  std::string gt;
  bool use_bias = false;
  Index rerank = 0;
  bool log_x = false;
};

GroundTruth load_or_compute_gt(const EvalArgs& a, const DataMatrix& base, const DataMatrix& query,
                               Index k, RunManifest& m) {
  std::string path = a.gt;
  if (path.empty()) {
    std::uint64_t h = detail::fnv1a64(detail::read_file_bytes(a.base));
    h = detail::fnv1a64(detail::read_file_bytes(a.query), h);
    path = a.base + ".gt-" + hex64(h) + ".ajbg";
  }
  if (fs::exists(path)) {
    try {
      GroundTruth g = read_ground_truth(path);
      if (g.k >= k && g.queries() == query.cols()) {
        m.inputs.push_back(path);
        return g.k == k ? g : g.prefix(k);
      }
    } catch (const Error& e) {
      std::cerr << "ignoring unreadable ground truth: " << e.what() << "\n";
    }
  }
  GroundTruth g = compute_ground_truth(base, query, k);
  ensure_parent_dir(path);
  write_ground_truth(path, g);
  m.outputs.push_back(path);
  return g;
}

int run_eval(const EvalArgs& a, RunManifest& m) {
  const NetworkParams p = read_model(a.model);
  const DataMatrix base = load_matrix(a.base);
  const DataMatrix query = load_matrix(a.query);
  m.inputs = {a.model, a.base, a.query};
  if (base.cols() == 0 || query.cols() == 0) throw Error("eval: empty base or query set");
  if (a.ks.empty()) throw Error("eval: empty --k list");
  if (a.max_retrieve > base.cols())
    throw DimensionError("eval: --max-retrieve K=" + std::to_string(a.max_retrieve) +
                         " exceeds the base size " + std::to_string(base.cols()));
  const Index k_max = *std::max_element(a.ks.begin(), a.ks.end());
  if (k_max < 1 || k_max > base.cols()) throw DimensionError("eval: k out of range");
  if (a.rerank > 0 && (a.rerank < k_max || a.rerank > base.cols()))
    throw DimensionError("eval: --rerank must lie in [max k, N_base]");

  const GroundTruth gt_all = load_or_compute_gt(a, base, query, k_max, m);
  const Normalizer nz{p.scale};
  const BinaryCodes base_codes = encode(p, apply_normalizer(nz, base, p.dims()), a.use_bias);
  const BinaryCodes query_codes = encode(p, apply_normalizer(nz, query, p.dims()), a.use_bias);

  ensure_parent_dir(a.out_prefix);
  std::ostringstream summary;
  summary << "k,m_recall" << (a.rerank > 0 ? ",rerank_recall" : "") << "\n";
  std::vector<Series> series;
  for (Index k : a.ks) {
    const GroundTruth gt = gt_all.prefix(k);
    const RecallCurve curve = recall_curve(gt, base_codes, query_codes, a.max_retrieve);
    const std::string path = a.out_prefix + ".k" + std::to_string(k) + ".recall.csv";
    write_text_file(path, recall_csv(curve));
    m.outputs.push_back(path);
    summary << k << ',' << fmt_double(curve.m_recall);
    std::cout << "k=" << k << "  m-Recall@" << a.max_retrieve << " = " << curve.m_recall;
    if (a.rerank > 0) {
      double acc = 0.0;
      for (Index j = 0; j < query.cols(); ++j) {
        const auto cand = hamming_topk(base_codes, query_codes.code_span(j), a.rerank);
        const auto top = rerank(base, cand, query.col(j), k);
        acc += recall_at(gt.rows[static_cast<std::size_t>(j)], top);
      }
      const double rr = acc / static_cast<double>(query.cols());
      summary << ',' << fmt_double(rr);
      std::cout << "  rerank(" << a.rerank << ") recall = " << rr;
    }
    summary << '\n';
    std::cout << "\n";
    Series s;
    s.name = "k=" + std::to_string(k);
    for (std::size_t i = 0; i < curve.values.size(); ++i) {
      s.xs.push_back(static_cast<double>(i + 1));
      s.ys.push_back(curve.values[i]);
    }
    series.push_back(std::move(s));
  }
  const std::string summary_path = a.out_prefix + ".summary.csv";
  write_text_file(summary_path, summary.str());
  m.outputs.push_back(summary_path);
  if (!a.svg.empty()) {
    PlotOptions opt;
    opt.title = "Recall@i (" + fs::path(a.model).filename().string() + ")";
    opt.x_label = "i (points retrieved in Hamming space)";
    opt.y_label = "Recall@i";
    opt.log_x = a.log_x;
    ensure_parent_dir(a.svg);
    write_text_file(a.svg, render_svg(series, opt));
    m.outputs.push_back(a.svg);
  }
  return kExitOk;
}

// --- plot --------------------------------------------------------------------

struct PlotArgs {
  std::vector<std::string> inputs;
  std::string out = "plot.svg";
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
};

int run_plot(const PlotArgs& a, RunManifest& m) {
  std::vector<Series> series;
  bool traces = true;
  for (const auto& path : a.inputs) {
    const std::string text = read_text_file(path);
    const CsvTable t = parse_csv(text);
    if (t.header.empty() || t.header[0] != "iteration") traces = false;
    series.push_back(series_from_csv(text, stem_of(path)));
    m.inputs.push_back(path);
  }
  PlotOptions opt;
  opt.title = a.title;
  opt.x_label = !a.x_label.empty() ? a.x_label : (traces ? "iteration" : "i");
  opt.y_label = !a.y_label.empty() ? a.y_label : (traces ? "cost" : "Recall@i");
  opt.log_x = a.log_x;
  const std::string svg = render_svg(series, opt);
  ensure_parent_dir(a.out);
  write_text_file(a.out, svg);
  m.outputs.push_back(a.out);
  std::cout << "wrote " << a.out << " with " << series.size() << " series\n";
  return kExitOk;
}

// --- gradcheck ---------------------------------------------------------------

struct GradcheckArgs {
  Index dims = 8;
  Index bits = 4;
  Index points = 5;
  std::uint64_t seed = 1;
  std::string method = "auto-jacobin";
  double alpha = -1.0;
  double epsilon = kDefaultEpsilon;
  double corrupt_t = kDautobinDefaultCorruption;
  double lambda_c = 0.5;
  double step = 1e-6;
  double tolerance = 1e-5;
  double inject_fault = 0.0;
  std::string report;
};

int run_gradcheck(const GradcheckArgs& a, RunManifest& m) {
  const VariantConfig method =
      variant_from(a.method, a.alpha, a.epsilon, a.corrupt_t, a.lambda_c, a.seed);
  if (!method.trains()) throw Error("gradcheck: lsh has no gradient");
  m.flags["alpha"] = method.alpha;
  const GradInstance inst = make_grad_instance(a.dims, a.bits, a.points, a.seed, a.corrupt_t);
  const auto checks = check_method_gradients(inst, method, a.step, a.inject_fault);
  bool ok = true;
  std::ostringstream csv;
  csv << "term,w1,w2,b1,b2,max\n";
  std::printf("%-12s %12s %12s %12s %12s %12s\n", "term", "W1", "W2", "b1", "b2", "max");
  for (const auto& c : checks) {
    std::printf("%-12s %12.3e %12.3e %12.3e %12.3e %12.3e\n", c.term.c_str(), c.report.w1,
                c.report.w2, c.report.b1, c.report.b2, c.report.max());
    csv << c.term << ',' << fmt_double(c.report.w1) << ',' << fmt_double(c.report.w2) << ','
        << fmt_double(c.report.b1) << ',' << fmt_double(c.report.b2) << ','
        << fmt_double(c.report.max()) << '\n';
    ok = ok && c.report.max() <= a.tolerance;
  }
  if (!a.report.empty()) {
    ensure_parent_dir(a.report);
    write_text_file(a.report, csv.str());
    m.outputs.push_back(a.report);
  }
  std::printf("%s (method %s, D=%ld, d=%ld, n=%ld, tolerance %.1e)\n", ok ? "PASS" : "FAIL",
              std::string(method_name(method.kind)).c_str(), static_cast<long>(a.dims),
              static_cast<long>(a.bits), static_cast<long>(a.points), a.tolerance);
  return ok ? kExitOk : kExitCheckFailed;
}

// --- toy ---------------------------------------------------------------------

struct ToyArgs {
  std::string out_dir = "toy";
  ToyOptions opt{};
};

int run_toy_cmd(const ToyArgs& a, RunManifest& m) {
  fs::create_directories(a.out_dir);
  const ToyResult r = run_toy(a.opt);
  const fs::path dir(a.out_dir);

  std::ostringstream summary;
  summary << "stage,distinct_codes,distinct_orthants,mean_abs_hidden,total,recon,jacobian,binary\n";
  auto row = [&](const char* stage, const ToySummary& s) {
    summary << stage << ',' << s.distinct_codes << ',' << s.distinct_orthants << ','
            << fmt_double(s.mean_abs_hidden) << ',' << fmt_double(s.cost.total()) << ','
            << fmt_double(s.cost.recon) << ',' << fmt_double(s.cost.jacobian) << ','
            << fmt_double(s.cost.binary) << '\n';
  };
  row("init", r.init);
  row("trained", r.trained);

  std::ostringstream hidden;
  hidden << "x1,x2,x3,y1,y2,y3,code\n";
  for (Index i = 0; i < r.hidden.cols(); ++i) {
    int code = 0;
    for (Index j = 0; j < 3; ++j) code |= r.codes.bit(i, j) ? (1 << j) : 0;
    for (Index j = 0; j < 3; ++j) hidden << fmt_double(r.data(j, i)) << ',';
    for (Index j = 0; j < 3; ++j) hidden << fmt_double(r.hidden(j, i)) << ',';
    hidden << code << '\n';
  }

  const std::string summary_path = (dir / "toy_summary.csv").string();
  const std::string hidden_path = (dir / "toy_hidden.csv").string();
  const std::string codes_path = (dir / "toy_codes.ajbc").string();
  const std::string model_path = (dir / "toy_model.ajb").string();
  const std::string trace_path = (dir / "toy_trace.csv").string();
  write_text_file(summary_path, summary.str());
  write_text_file(hidden_path, hidden.str());
  write_codes(codes_path, r.codes);
  write_model(model_path, r.params);
  write_text_file(trace_path, trace_csv(r.report));
  m.outputs = {summary_path, hidden_path, codes_path, model_path, trace_path};

  std::cout << "init:    " << r.init.distinct_codes << " codes, " << r.init.distinct_orthants
            << " hidden orthants, mean |y| " << r.init.mean_abs_hidden << ", cost "
            << r.init.cost.total() << "\n";
  std::cout << "trained: " << r.trained.distinct_codes << " codes, " << r.trained.distinct_orthants
            << " hidden orthants, mean |y| " << r.trained.mean_abs_hidden << ", cost "
            << r.trained.cost.total() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> raw(argv, argv + argc);
  std::vector<std::string> args;
  try {
    args = merge_config_args(raw);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }

  CLI::App app{"Auto-encoder Jacobian binary hashing: train, encode and evaluate binary codes"};
  app.require_subcommand(1);
  app.set_version_flag("--version", AUTOJACOBIN_VERSION);
  auto add_config = [](CLI::App* sub) {
    sub->add_option("--config", "key=value file; command-line flags take precedence");
  };

  ConvertArgs ca;
  auto* convert = app.add_subcommand("convert", "Convert between fvecs/bvecs/text or generate synthetic data");
  convert->add_option("--input", ca.input, "Input file (.fvecs, .bvecs or text)");
  convert->add_option("--output", ca.output, "Output file; format from extension")->required();
  convert->add_option("--limit", ca.limit, "Keep only the first N vectors");
  convert->add_option("--synthetic", ca.synthetic, "Generate instead of reading: manifold, simplex or plane");
  convert->add_option("--count", ca.count, "Number of synthetic points")->capture_default_str();
  convert->add_option("--dims", ca.dims, "Ambient dimension")->capture_default_str();
  convert->add_option("--intrinsic", ca.intrinsic, "Intrinsic dimension")->capture_default_str();
  convert->add_option("--frequency", ca.frequency, "Manifold curvature scale")->capture_default_str();
  convert->add_option("--noise", ca.noise, "Gaussian noise level")->capture_default_str();
  convert->add_option("--manifold-seed", ca.manifold_seed, "Seed fixing the manifold embedding")->capture_default_str();
  convert->add_option("--seed", ca.seed, "Seed for the sampled points")->capture_default_str();
  add_config(convert);

  TrainArgs ta;
  auto* trainc = app.add_subcommand("train", "Train a model and write .ajb plus a cost trace");
  trainc->add_option("--input", ta.input, "Training vectors")->required();
  trainc->add_option("--bits", ta.bits, "Code length d")->capture_default_str();
  trainc->add_option("--method", ta.method, "auto-jacobin, autobin, dautobin, cautobin or lsh")->capture_default_str();
  trainc->add_option("--alpha", ta.alpha, "Binary-constraint weight (default 0.1; 0.01 for cautobin)");
  trainc->add_option("--epsilon", ta.epsilon, "Smoothing constant of the approximate 1-norm")->capture_default_str();
  trainc->add_option("--epochs", ta.epochs, "Passes over the training set")->capture_default_str();
  trainc->add_option("--batch", ta.batch, "Mini-batch size")->capture_default_str();
  trainc->add_option("--max-iterations", ta.max_iterations, "Stop after this many updates (0 = no cap)")->capture_default_str();
  trainc->add_option("--seed", ta.seed, "Random seed")->capture_default_str();
  trainc->add_option("--corrupt-t", ta.corrupt_t, "dautobin masking threshold t")->capture_default_str();
  trainc->add_option("--lambda-c", ta.lambda_c, "cautobin contractive weight")->capture_default_str();
  trainc->add_option("--out", ta.out, "Model output path")->capture_default_str();
  trainc->add_option("--trace", ta.trace, "Cost-trace CSV (default <out>.trace.csv)");
  trainc->add_option("--tangent-cache", ta.tangent_cache, "Tangent cache (.ajbt) to reuse or create");
  trainc->add_option("--train-limit", ta.train_limit, "Use only the first N training vectors");
  trainc->add_flag("--unit-step", ta.unit_step, "Start every line search at step 1");
  add_config(trainc);

  EncodeArgs ea;
  auto* encodec = app.add_subcommand("encode", "Encode vectors into packed binary codes (.ajbc)");
  encodec->add_option("--model", ea.model, "Model file")->required();
  encodec->add_option("--input", ea.input, "Vectors to encode")->required();
  encodec->add_option("--out", ea.out, "Codes output path")->required();
  encodec->add_flag("--use-bias", ea.use_bias, "Threshold W1 x + b1 instead of W1 x");
  add_config(encodec);

  EvalArgs va;
  auto* evalc = app.add_subcommand("eval", "Recall@i curves and m-Recall against exact Euclidean neighbours");
  evalc->add_option("--model", va.model, "Model file")->required();
  evalc->add_option("--base", va.base, "Base vectors")->required();
  evalc->add_option("--query", va.query, "Query vectors")->required();
  evalc->add_option("--k", va.ks, "True-neighbour counts")->delimiter(',')->capture_default_str();
  evalc->add_option("--max-retrieve", va.max_retrieve, "K, the largest Hamming retrieval depth")->capture_default_str();
  evalc->add_option("--out-prefix", va.out_prefix, "Prefix for CSV outputs")->capture_default_str();
  evalc->add_option("--svg", va.svg, "Also write the curves as SVG");
  evalc->add_option("--gt", va.gt, "Ground-truth file (default: cached beside the base file)");
  evalc->add_option("--rerank", va.rerank, "Also report recall after Euclidean reranking of the top-R Hamming candidates");
  evalc->add_flag("--use-bias", va.use_bias, "Threshold W1 x + b1 instead of W1 x");
  evalc->add_flag("--log-x", va.log_x, "Logarithmic x axis in the SVG");
  add_config(evalc);

  GradcheckArgs ga;
  auto* gradc = app.add_subcommand("gradcheck", "Compare analytic gradients with finite differences");
  gradc->add_option("--dims", ga.dims, "Input dimension D")->capture_default_str();
  gradc->add_option("--bits", ga.bits, "Hidden size d")->capture_default_str();
  gradc->add_option("--points", ga.points, "Batch size n")->capture_default_str();
  gradc->add_option("--seed", ga.seed, "Random seed")->capture_default_str();
  gradc->add_option("--method", ga.method, "auto-jacobin, autobin, dautobin or cautobin")->capture_default_str();
  gradc->add_option("--alpha", ga.alpha, "Binary-constraint weight (default per method)");
  gradc->add_option("--epsilon", ga.epsilon, "Smoothing constant")->capture_default_str();
  gradc->add_option("--corrupt-t", ga.corrupt_t, "dautobin masking threshold")->capture_default_str();
  gradc->add_option("--lambda-c", ga.lambda_c, "cautobin contractive weight")->capture_default_str();
  gradc->add_option("--step", ga.step, "Finite-difference step h")->capture_default_str();
  gradc->add_option("--tolerance", ga.tolerance, "Maximum allowed relative error")->capture_default_str();
  gradc->add_option("--inject-fault", ga.inject_fault, "Add this to analytic dW1(0,0) (checker self-test)");
  gradc->add_option("--report", ga.report, "Also write the error table as CSV");
  add_config(gradc);

  ToyArgs ya;
  auto* toyc = app.add_subcommand("toy", "3-bit codes for points on the 2-simplex");
  toyc->add_option("--out-dir", ya.out_dir, "Output directory")->capture_default_str();
  toyc->add_option("--seed", ya.opt.seed, "Random seed")->capture_default_str();
  toyc->add_option("--points", ya.opt.points, "Number of points")->capture_default_str();
  toyc->add_option("--epochs", ya.opt.epochs, "Epochs")->capture_default_str();
  toyc->add_option("--batch", ya.opt.batch_size, "Mini-batch size")->capture_default_str();
  toyc->add_option("--alpha", ya.opt.alpha, "Binary-constraint weight")->capture_default_str();
  add_config(toyc);

  PlotArgs pa;
  auto* plotc = app.add_subcommand("plot", "Render recall or cost-trace CSVs as an SVG line chart");
  plotc->add_option("--input", pa.inputs, "CSV file (repeatable)")->required();
  plotc->add_option("--out", pa.out, "SVG output path")->capture_default_str();
  plotc->add_option("--title", pa.title, "Chart title");
  plotc->add_option("--x-label", pa.x_label, "x-axis label");
  plotc->add_option("--y-label", pa.y_label, "y-axis label");
  plotc->add_flag("--log-x", pa.log_x, "Logarithmic x axis");
  add_config(plotc);

  std::vector<const char*> cargv;
  for (const auto& s : args) cargv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(cargv.size()), cargv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  RunManifest manifest;
  std::string manifest_path;
  try {
    int rc = kExitOk;
    if (convert->parsed()) {
      manifest.command = "convert";
      manifest.seed = ca.seed;
      manifest.capture_flags(*convert);
      rc = run_convert(ca, manifest);
      manifest_path = ca.output + ".manifest.json";
    } else if (trainc->parsed()) {
      manifest.command = "train";
      manifest.seed = ta.seed;
      manifest.capture_flags(*trainc);
      rc = run_train(ta, manifest);
      manifest_path = ta.out + ".manifest.json";
    } else if (encodec->parsed()) {
      manifest.command = "encode";
      manifest.capture_flags(*encodec);
      rc = run_encode(ea, manifest);
      manifest_path = ea.out + ".manifest.json";
    } else if (evalc->parsed()) {
      manifest.command = "eval";
      manifest.capture_flags(*evalc);
      rc = run_eval(va, manifest);
      manifest_path = va.out_prefix + ".manifest.json";
    } else if (gradc->parsed()) {
      manifest.command = "gradcheck";
      manifest.seed = ga.seed;
      manifest.capture_flags(*gradc);
      rc = run_gradcheck(ga, manifest);
      if (!ga.report.empty()) manifest_path = ga.report + ".manifest.json";
    } else if (toyc->parsed()) {
      manifest.command = "toy";
      manifest.seed = ya.opt.seed;
      manifest.capture_flags(*toyc);
      rc = run_toy_cmd(ya, manifest);
      manifest_path = (fs::path(ya.out_dir) / "toy.manifest.json").string();
    } else if (plotc->parsed()) {
      manifest.command = "plot";
      manifest.capture_flags(*plotc);
      rc = run_plot(pa, manifest);
      manifest_path = pa.out + ".manifest.json";
    }
    if (!manifest_path.empty()) manifest.write(manifest_path);
    return rc;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}
