#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include "patchprior/patchprior.hpp"

namespace patchprior::cli {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

// Bad flag combinations detected after parsing; reported like parse errors.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join(const std::vector<double>& values) {
  std::string s;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) s += ',';
    s += fmt(values[i]);
  }
  return s;
}

void write_text_atomically(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + tmp.string() + " for writing");
    f << text;
    if (!f.flush()) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

HqsSchedule schedule_for(double sigma, const std::vector<double>& multipliers) {
  return multipliers.empty() ? default_schedule(sigma)
                             : schedule_from_multipliers(sigma, multipliers);
}

std::vector<double> multipliers_or_default(const std::vector<double>& multipliers) {
  return multipliers.empty() ? std::vector<double>{1, 4, 8, 16, 32} : multipliers;
}

std::size_t patch_side(const Gmm& model) {
  const auto s = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(model.dim()))));
  if (s * s != model.dim()) throw InvalidArgument("model dimension is not a square patch size");
  return s;
}

// 3x3 mean filter with replicated borders.
ImageBuffer box_filter(const ImageBuffer& img) {
  ImageBuffer out(img.width(), img.height());
  const long w = static_cast<long>(img.width());
  const long h = static_cast<long>(img.height());
  for (long r = 0; r < h; ++r) {
    for (long c = 0; c < w; ++c) {
      double acc = 0.0;
      for (long i = -1; i <= 1; ++i) {
        for (long j = -1; j <= 1; ++j) {
          acc += img.at(static_cast<std::size_t>(std::clamp(r + i, 0L, h - 1)),
                        static_cast<std::size_t>(std::clamp(c + j, 0L, w - 1)));
        }
      }
      out.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = acc / 9.0;
    }
  }
  return out;
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  std::string corpus;
  std::string output;
  std::size_t patch_size = 8;
  std::size_t stride = 1;
  std::size_t k = 20;
  std::uint64_t seed = 0;
  std::size_t iters = 100;
  double tol = 1e-5;
  std::size_t max_patches = 0;
};

int run_train(const TrainArgs& a, std::ostream& out) {
  const auto t0 = Clock::now();
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(a.corpus)) {
    if (entry.is_regular_file() && entry.path().extension() == ".pgm") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw InsufficientData("no .pgm files in " + a.corpus);

  std::vector<Eigen::MatrixXd> blocks;
  Eigen::Index total = 0;
  for (const auto& f : files) {
    PatchSet p = extract_patches(read_pgm(f), a.patch_size, a.stride);
    total += p.data().cols();
    blocks.push_back(std::move(p.data()));
  }
  const auto d = static_cast<Eigen::Index>(a.patch_size * a.patch_size);
  Eigen::MatrixXd all(d, total);
  Eigen::Index at = 0;
  for (const auto& b : blocks) {
    all.middleCols(at, b.cols()) = b;
    at += b.cols();
  }
  blocks.clear();

  if (a.max_patches > 0 && static_cast<std::size_t>(total) > a.max_patches) {
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(total));
    std::iota(idx.begin(), idx.end(), 0);
    std::mt19937_64 rng(a.seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(a.max_patches);
    std::sort(idx.begin(), idx.end());
    Eigen::MatrixXd sub(d, static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) sub.col(static_cast<Eigen::Index>(i)) = all.col(idx[i]);
    all = std::move(sub);
  }
  const double load_s = seconds_since(t0);

  EmConfig config;
  config.components = a.k;
  config.max_iters = a.iters;
  config.tol = a.tol;
  config.seed = a.seed;
  const auto t1 = Clock::now();
  const std::size_t n = static_cast<std::size_t>(all.cols());
  EmResult fit = em_fit(PatchSet(std::move(all)), config);
  const double fit_s = seconds_since(t1);
  save_model(fit.model, a.output);

  RunManifest m("train");
  m.set("corpus", a.corpus);
  m.set("corpus_files", static_cast<long long>(files.size()));
  m.set("output", a.output);
  m.set("patch_size", static_cast<long long>(a.patch_size));
  m.set("stride", static_cast<long long>(a.stride));
  m.set("k", static_cast<long long>(a.k));
  m.set("seed", static_cast<long long>(a.seed));
  m.set("iters", static_cast<long long>(a.iters));
  m.set("tol", a.tol);
  m.set("max_patches", static_cast<long long>(a.max_patches));
  m.set("patches_used", static_cast<long long>(n));
  m.set("em_iterations", static_cast<long long>(fit.iterations));
  m.set("em_converged", fit.converged ? "true" : "false");
  m.set("reseeded_components", static_cast<long long>(fit.events.size()));
  if (!fit.log_likelihood_trace.empty()) m.set("final_log_likelihood", fit.log_likelihood_trace.back());
  m.record_timing("load", load_s);
  m.record_timing("em", fit_s);
  m.write_next_to(a.output);

  out << "trained K=" << a.k << " d=" << d << " on " << n << " patches in " << fit.iterations
      << " iterations" << (fit.converged ? " (converged)" : "") << "\n";
  for (const auto& e : fit.events) out << "  " << e << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- adapt

struct SureArgs {
  std::uint64_t seed = 0;
  std::size_t probes = 1;
  double delta = 0.01;
  double floor = 1.0;
};

SureConfig to_config(const SureArgs& s) {
  SureConfig c;
  c.seed = s.seed;
  c.probes = s.probes;
  c.delta = s.delta;
  c.floor = s.floor;
  return c;
}

void record_sure(RunManifest& m, const SureArgs& s) {
  m.set("sure_seed", static_cast<long long>(s.seed));
  m.set("sure_probes", static_cast<long long>(s.probes));
  m.set("sure_delta", s.delta);
  m.set("sure_floor", s.floor);
}

struct AdaptArgs {
  std::string model;
  std::string image;
  std::string output;
  double rho = 1.0;
  std::string sigma_tilde = "0";
  std::optional<double> sigma;
  std::size_t iters = 1;
  std::size_t stride = 1;
  std::vector<double> betas;
  SureArgs sure;
  bool direct_covariance = false;
};

std::string format_report(const AdaptArgs& a, const AdaptationConfig& c,
                          const AdaptationReport& r) {
  std::ostringstream s;
  s << "rho = " << fmt(c.rho) << "\n";
  s << "sigma_tilde_sq = " << fmt(c.sigma_tilde_sq) << "\n";
  s << "iterations = " << c.iterations << "\n";
  s << "stride = " << a.stride << "\n";
  for (std::size_t i = 0; i < r.objective.size(); ++i) {
    s << "objective." << (i + 1) << " = " << fmt(r.objective[i]) << "\n";
  }
  s << "mstep_seconds = " << fmt(r.mstep_seconds) << "\n";
  s << "component,count,alpha\n";
  for (Eigen::Index k = 0; k < r.counts.size(); ++k) {
    s << k << "," << fmt(r.counts[k]) << "," << fmt(r.alpha[k]) << "\n";
  }
  return s.str();
}

int run_adapt(const AdaptArgs& a, std::ostream& out) {
  const auto t0 = Clock::now();
  const Gmm generic = load_model(a.model);
  const ImageBuffer image = read_pgm(a.image);
  const std::size_t side = patch_side(generic);

  RunManifest m("adapt");
  m.set("model", a.model);
  m.set("image", a.image);
  m.set("output", a.output);
  m.set("rho", a.rho);
  m.set("iters", static_cast<long long>(a.iters));
  m.set("stride", static_cast<long long>(a.stride));
  m.set("patch_size", static_cast<long long>(side));
  m.set("covariance_update", a.direct_covariance ? "direct" : "fast");
  m.set("sigma_tilde", a.sigma_tilde);
  m.record_timing("load", seconds_since(t0));

  // Adapt to the image as given, or to its pre-filtered version when the
  // residual variance is estimated.
  ImageBuffer source = image;
  double sigma_tilde_sq = 0.0;
  if (a.sigma_tilde == "sure") {
    if (!a.sigma) throw UsageError("--sigma-tilde sure requires --sigma");
    const double sigma = *a.sigma;
    const HqsSchedule schedule = schedule_for(sigma, a.betas);
    m.set("sigma", sigma);
    m.set("prefilter", "epll");
    m.set("betas", join(multipliers_or_default(a.betas)));
    record_sure(m, a.sure);
    const auto t1 = Clock::now();
    const Denoiser prefilter = [&](const ImageBuffer& y) {
      return denoise(y, sigma, generic, schedule).image;
    };
    const SureEstimate est = monte_carlo_sure(image, sigma, prefilter, to_config(a.sure));
    source = prefilter(image);
    sigma_tilde_sq = est.sigma_tilde_sq;
    m.set("sure_raw", est.raw);
    m.record_timing("prefilter_and_sure", seconds_since(t1));
  } else {
    std::size_t used = 0;
    try {
      sigma_tilde_sq = std::stod(a.sigma_tilde, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != a.sigma_tilde.size() || !(sigma_tilde_sq >= 0.0) || !std::isfinite(sigma_tilde_sq)) {
      throw UsageError("--sigma-tilde must be a non-negative number or 'sure'");
    }
    // The flag is a standard deviation; adaptation works with its square.
    sigma_tilde_sq *= sigma_tilde_sq;
  }
  m.set("sigma_tilde_sq", sigma_tilde_sq);

  AdaptationConfig config;
  config.rho = a.rho;
  config.sigma_tilde_sq = sigma_tilde_sq;
  config.iterations = a.iters;
  config.fast_covariance = !a.direct_covariance;
  const auto t2 = Clock::now();
  const PatchSet patches = extract_patches(source, side, a.stride);
  const AdaptationResult result = adapt(generic, patches, config);
  m.record_timing("adapt", seconds_since(t2));
  m.set("patches_used", static_cast<long long>(patches.count()));

  save_model(result.model, a.output);
  const std::string report = format_report(a, config, result.report);
  const fs::path report_path = a.output + ".report.txt";
  write_text_atomically(report_path, report);
  m.set("report", report_path.string());
  m.write_next_to(a.output);
  out << report;
  return kExitOk;
}

// ---------------------------------------------------------------- denoise

struct DenoiseArgs {
  std::string input;
  std::string output;
  std::string model;
  double sigma = 0.0;
  std::vector<double> betas;
  std::string trace;
  std::string ref;
};

int run_denoise(const DenoiseArgs& a, std::ostream& out) {
  if (!a.trace.empty() && a.ref.empty()) throw UsageError("--trace requires --ref");
  const auto t0 = Clock::now();
  const ImageBuffer noisy = read_pgm(a.input);
  const Gmm prior = load_model(a.model);
  std::optional<ImageBuffer> reference;
  if (!a.ref.empty()) reference = read_pgm(a.ref);
  const double load_s = seconds_since(t0);

  const HqsSchedule schedule = schedule_for(a.sigma, a.betas);
  const auto t1 = Clock::now();
  const DenoiseResult result = denoise(noisy, a.sigma, prior, schedule, reference);
  const double denoise_s = seconds_since(t1);
  write_pgm(result.image, a.output);

  RunManifest m("denoise");
  m.set("input", a.input);
  m.set("output", a.output);
  m.set("model", a.model);
  m.set("sigma", a.sigma);
  m.set("betas", join(multipliers_or_default(a.betas)));
  m.set("data_weight", schedule.data_weight);
  m.set("patch_size", static_cast<long long>(patch_side(prior)));
  m.set("stride", 1LL);
  if (reference) {
    m.set("ref", a.ref);
    const double final_psnr = psnr(*reference, quantize(result.image));
    m.set("psnr", final_psnr);
    out << "psnr " << fmt(final_psnr) << "\n";
  }
  if (!a.trace.empty()) {
    std::ostringstream csv;
    csv << "stage,beta,psnr\n";
    for (std::size_t j = 0; j < result.psnr_trace.size(); ++j) {
      csv << (j + 1) << "," << fmt(schedule.betas[j]) << "," << fmt(result.psnr_trace[j]) << "\n";
    }
    if (a.trace == "-") {
      out << csv.str();
    } else {
      write_text_atomically(a.trace, csv.str());
    }
    m.set("trace", a.trace);
  }
  m.record_timing("load", load_s);
  m.record_timing("denoise", denoise_s);
  m.write_next_to(a.output);
  return kExitOk;
}

// ---------------------------------------------------------------- sure

struct SureCmdArgs {
  std::string input;
  double sigma = 0.0;
  std::string prefilter = "epll";
  std::string model;
  std::vector<double> betas;
  std::string manifest;
  SureArgs sure;
};

int run_sure(const SureCmdArgs& a, std::ostream& out) {
  if (a.prefilter == "epll" && a.model.empty()) throw UsageError("--prefilter epll requires --model");
  const auto t0 = Clock::now();
  const ImageBuffer noisy = read_pgm(a.input);
  RunManifest m("sure");
  m.set("input", a.input);
  m.set("sigma", a.sigma);
  m.set("prefilter", a.prefilter);
  record_sure(m, a.sure);

  Denoiser prefilter;
  std::optional<Gmm> prior;
  HqsSchedule schedule;
  if (a.prefilter == "epll") {
    prior = load_model(a.model);
    schedule = schedule_for(a.sigma, a.betas);
    m.set("model", a.model);
    m.set("betas", join(multipliers_or_default(a.betas)));
    prefilter = [&](const ImageBuffer& y) { return denoise(y, a.sigma, *prior, schedule).image; };
  } else {
    prefilter = box_filter;
  }
  const SureEstimate est = monte_carlo_sure(noisy, a.sigma, prefilter, to_config(a.sure));
  m.set("sigma_tilde_sq", est.sigma_tilde_sq);
  m.set("sure_raw", est.raw);
  m.record_timing("sure", seconds_since(t0));
  m.write_next_to(a.manifest.empty() ? a.input + ".sure" : a.manifest);

  out << "sigma_tilde_sq " << fmt(est.sigma_tilde_sq) << "\n";
  out << "sigma_tilde_over_sigma "
      << fmt(a.sigma > 0.0 ? std::sqrt(est.sigma_tilde_sq) / a.sigma : 0.0) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- noise

struct NoiseArgs {
  std::string input;
  std::string output;
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

int run_noise(const NoiseArgs& a, std::ostream&) {
  const auto t0 = Clock::now();
  const ImageBuffer clean = read_pgm(a.input);
  write_pgm(add_gaussian_noise(clean, a.sigma, a.seed), a.output);
  RunManifest m("noise");
  m.set("input", a.input);
  m.set("output", a.output);
  m.set("sigma", a.sigma);
  m.set("seed", static_cast<long long>(a.seed));
  m.record_timing("noise", seconds_since(t0));
  m.write_next_to(a.output);
  return kExitOk;
}

// ---------------------------------------------------------------- psnr

struct PsnrArgs {
  std::string reference;
  std::string test;
  std::string manifest;
};

int run_psnr(const PsnrArgs& a, std::ostream& out) {
  const double value = psnr(read_pgm(a.reference), read_pgm(a.test));
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", value);
  out << buf << "\n";
  RunManifest m("psnr");
  m.set("reference", a.reference);
  m.set("test", a.test);
  m.set("psnr", value);
  m.write_next_to(a.manifest.empty() ? a.test + ".psnr" : a.manifest);
  return kExitOk;
}

// ---------------------------------------------------------------- toy

struct ToyArgs {
  std::string out_dir;
  std::uint64_t seed = 0;
  double rho = 1.0;
  std::size_t external_points = 400;
  std::size_t internal_points = 20;
};

void append_points(std::ostringstream& csv, const std::string& set, const MixtureSample& s) {
  for (Eigen::Index i = 0; i < s.points.cols(); ++i) {
    csv << set << "," << s.labels[static_cast<std::size_t>(i)] << "," << fmt(s.points(0, i)) << ","
        << fmt(s.points(1, i)) << "\n";
  }
}

void append_params(std::ostringstream& csv, const std::string& name, const Gmm& g) {
  for (std::size_t k = 0; k < g.num_components(); ++k) {
    const auto& c = g.covariances[k];
    csv << name << "," << k << "," << fmt(g.weights[static_cast<Eigen::Index>(k)]) << ","
        << fmt(g.means[k][0]) << "," << fmt(g.means[k][1]) << "," << fmt(c(0, 0)) << ","
        << fmt(c(0, 1)) << "," << fmt(c(1, 1)) << "\n";
  }
}

int run_toy(const ToyArgs& a, std::ostream& out) {
  const auto t0 = Clock::now();
  ToyConfig config;
  config.seed = a.seed;
  config.rho = a.rho;
  config.external_points = a.external_points;
  config.internal_points = a.internal_points;
  const ToyResult r = run_toy_experiment(config);

  fs::create_directories(a.out_dir);
  std::ostringstream points;
  points << "set,component,x,y\n";
  append_points(points, "external", r.external);
  append_points(points, "internal", r.internal);
  std::ostringstream params;
  params << "model,component,weight,mean_x,mean_y,cov_xx,cov_xy,cov_yy\n";
  append_params(params, "truth_external", toy_external_mixture());
  append_params(params, "truth_internal", toy_internal_mixture());
  append_params(params, "generic", r.generic);
  append_params(params, "scratch", r.scratch);
  append_params(params, "adapted", r.adapted);
  const fs::path dir(a.out_dir);
  write_text_atomically(dir / "points.csv", points.str());
  write_text_atomically(dir / "params.csv", params.str());

  RunManifest m("toy");
  m.set("out_dir", a.out_dir);
  m.set("seed", static_cast<long long>(a.seed));
  m.set("rho", a.rho);
  m.set("external_points", static_cast<long long>(a.external_points));
  m.set("internal_points", static_cast<long long>(a.internal_points));
  m.set("scratch_mean_error", r.scratch_error);
  m.set("adapted_mean_error", r.adapted_error);
  m.record_timing("toy", seconds_since(t0));
  m.write_next_to(dir / "params.csv");

  out << "scratch_mean_error " << fmt(r.scratch_error) << "\n";
  out << "adapted_mean_error " << fmt(r.adapted_error) << "\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Patch-prior denoising with EM-adapted Gaussian mixtures", "patchprior"};
  app.require_subcommand(1);
  std::function<int()> action;

  TrainArgs train;
  auto* t = app.add_subcommand("train", "Fit a generic mixture to patches of a PGM corpus");
  t->add_option("corpus", train.corpus, "Directory of .pgm images")->required();
  t->add_option("-o,--output", train.output, "Model file")->required();
  t->add_option("--patch-size", train.patch_size, "Patch side length")->check(CLI::PositiveNumber);
  t->add_option("--stride", train.stride, "Patch stride")->check(CLI::PositiveNumber);
  t->add_option("--k", train.k, "Mixture components")->check(CLI::PositiveNumber);
  t->add_option("--seed", train.seed, "Initialization and subsampling seed");
  t->add_option("--iters", train.iters, "Maximum EM iterations")->check(CLI::PositiveNumber);
  t->add_option("--tol", train.tol, "Relative log-likelihood tolerance")->check(CLI::NonNegativeNumber);
  t->add_option("--max-patches", train.max_patches, "Random subset size, 0 keeps all");
  t->callback([&] { action = [&] { return run_train(train, out); }; });

  AdaptArgs adapt_args;
  auto* ad = app.add_subcommand("adapt", "Adapt a generic model to one image");
  ad->add_option("--model", adapt_args.model, "Generic model")->required();
  ad->add_option("--image", adapt_args.image, "Adaptation image (clean, pre-filtered or noisy with 'sure')")
      ->required();
  ad->add_option("-o,--output", adapt_args.output, "Adapted model file")->required();
  ad->add_option("--rho", adapt_args.rho, "Relevance factor")->check(CLI::PositiveNumber);
  ad->add_option("--sigma-tilde", adapt_args.sigma_tilde,
                 "Residual noise std of the image, or 'sure' to pre-filter and estimate it");
  ad->add_option("--sigma", adapt_args.sigma, "Noise std of the image, needed with 'sure'")
      ->check(CLI::PositiveNumber);
  ad->add_option("--iters", adapt_args.iters, "Adaptation iterations")->check(CLI::PositiveNumber);
  ad->add_option("--stride", adapt_args.stride, "Patch stride")->check(CLI::PositiveNumber);
  ad->add_option("--betas", adapt_args.betas, "Pre-filter schedule multipliers")->delimiter(',');
  ad->add_option("--seed", adapt_args.sure.seed, "SURE probe seed");
  ad->add_option("--probes", adapt_args.sure.probes, "SURE probes")->check(CLI::PositiveNumber);
  ad->add_option("--delta", adapt_args.sure.delta, "SURE probe amplitude")->check(CLI::PositiveNumber);
  ad->add_flag("--direct-covariance", adapt_args.direct_covariance,
               "Use the two-pass covariance update");
  ad->callback([&] { action = [&] { return run_adapt(adapt_args, out); }; });

  DenoiseArgs den;
  auto* dn = app.add_subcommand("denoise", "Denoise a PGM with a mixture patch prior");
  dn->add_option("input", den.input, "Noisy image")->required();
  dn->add_option("-o,--output", den.output, "Denoised image")->required();
  dn->add_option("--model", den.model, "Prior model")->required();
  dn->add_option("--sigma", den.sigma, "Noise std")->required()->check(CLI::PositiveNumber);
  dn->add_option("--betas", den.betas, "Schedule multipliers, beta = m / sigma^2")->delimiter(',');
  dn->add_option("--trace", den.trace, "Per-stage CSV (stage,beta,psnr), - for stdout");
  dn->add_option("--ref", den.ref, "Clean reference for PSNR");
  dn->callback([&] { action = [&] { return run_denoise(den, out); }; });

  SureCmdArgs sure;
  auto* su = app.add_subcommand("sure", "Estimate the residual variance after pre-filtering");
  su->add_option("input", sure.input, "Noisy image")->required();
  su->add_option("--sigma", sure.sigma, "Noise std")->required()->check(CLI::PositiveNumber);
  su->add_option("--prefilter", sure.prefilter, "epll or box")->check(CLI::IsMember({"epll", "box"}));
  su->add_option("--model", sure.model, "Prior for the epll pre-filter");
  su->add_option("--betas", sure.betas, "Pre-filter schedule multipliers")->delimiter(',');
  su->add_option("--seed", sure.sure.seed, "Probe seed");
  su->add_option("--probes", sure.sure.probes, "Probes averaged")->check(CLI::PositiveNumber);
  su->add_option("--delta", sure.sure.delta, "Probe amplitude")->check(CLI::PositiveNumber);
  su->add_option("--manifest", sure.manifest, "Manifest base path");
  su->callback([&] { action = [&] { return run_sure(sure, out); }; });

  NoiseArgs noise;
  auto* no = app.add_subcommand("noise", "Add white Gaussian noise to a PGM");
  no->add_option("input", noise.input, "Clean image")->required();
  no->add_option("-o,--output", noise.output, "Noisy image")->required();
  no->add_option("--sigma", noise.sigma, "Noise std")->required()->check(CLI::NonNegativeNumber);
  no->add_option("--seed", noise.seed, "Noise seed");
  no->callback([&] { action = [&] { return run_noise(noise, out); }; });

  PsnrArgs ps;
  auto* pn = app.add_subcommand("psnr", "PSNR in dB between two PGMs");
  pn->add_option("reference", ps.reference, "Reference image")->required();
  pn->add_option("test", ps.test, "Test image")->required();
  pn->add_option("--manifest", ps.manifest, "Manifest base path");
  pn->callback([&] { action = [&] { return run_psnr(ps, out); }; });

  ToyArgs toy;
  auto* ty = app.add_subcommand("toy", "Two-dimensional adaptation demo, CSV output");
  ty->add_option("--out-dir", toy.out_dir, "Output directory")->required();
  ty->add_option("--seed", toy.seed, "Sampling and initialization seed");
  ty->add_option("--rho", toy.rho, "Relevance factor")->check(CLI::PositiveNumber);
  ty->add_option("--external-points", toy.external_points, "Points for the generic model")
      ->check(CLI::PositiveNumber);
  ty->add_option("--internal-points", toy.internal_points, "Points adapted to")->check(CLI::PositiveNumber);
  ty->callback([&] { action = [&] { return run_toy(toy, out); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    return kExitUsage;
  }

  try {
    return action();
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace patchprior::cli
