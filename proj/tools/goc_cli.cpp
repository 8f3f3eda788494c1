// goc: command-line front end.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <boost/random/mersenne_twister.hpp>

#include "goc/goc.hpp"

namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kIo = 1, kInvalid = 2, kNotConverged = 3 };

struct Common {
  std::vector<std::string> configs;
  std::uint64_t seed = 0;
  std::string out_dir;
};

void add_common(CLI::App* sub, Common& c, bool with_out_dir = true) {
  sub->add_option("--config", c.configs, "config file(s), later ones override earlier ones")->check(CLI::ExistingFile);
  sub->add_option("--seed", c.seed, "random seed");
  if (with_out_dir) sub->add_option("--out-dir", c.out_dir, "output directory");
}

goc::FlatConfig read_configs(Common const& c) {
  goc::FlatConfig f;
  for (auto const& p : c.configs) f.parse_file(p);
  return f;
}

std::string out_dir(Common const& c, goc::RunConfig const& rc) {
  std::string d = !c.out_dir.empty() ? c.out_dir : (!rc.io.out_dir.empty() ? rc.io.out_dir : ".");
  std::error_code ec;
  fs::create_directories(d, ec);
  if (ec) throw goc::IoError("cannot create " + d + ": " + ec.message());
  return d;
}

std::ofstream open_out(std::string const& path) {
  std::ofstream os(path);
  if (!os) throw goc::IoError("cannot write " + path);
  return os;
}

void finish(std::ofstream& os, std::string const& path) {
  os.flush();
  if (!os) throw goc::IoError("write failed for " + path);
}

std::string join(std::string const& dir, std::string const& name) { return (fs::path(dir) / name).string(); }

// ---------------------------------------------------------------------------

int run_analyze(Common const& c) {
  auto const cfg = read_configs(c);
  auto rc = goc::to_run_config(cfg);
  std::string const dir = out_dir(c, rc);
  std::string const head = "# " + goc::provenance_line(c.seed, rc.hash);
  auto& p = rc.prior;

  goc::StabilityReport rep;
  std::string failure;
  try {
    if (rc.prior_factor > 0.0 || rc.beta_auto) {
      bool const was_auto = rc.beta_auto;
      rc.beta_auto = false;
      goc::resolve_prior(rc);
      if (was_auto) p.beta_c = goc::beta_for_minimum(p);
    }
    rep = goc::validate(p);
  } catch (goc::InvalidParameters const& e) {
    failure = e.what();
  } catch (goc::DegenerateG10 const& e) {
    failure = e.what();
  } catch (std::invalid_argument const& e) {
    failure = e.what();
  }
  if (failure.empty() && !rep.valid) failure = rep.reason;

  auto write_curve = [&](std::string const& name, std::string const& header,
                         std::vector<std::pair<double, double>> const& curve) {
    std::string const path = join(dir, name);
    auto os = open_out(path);
    os << head << '\n';
    goc::write_curve_csv(os, header, curve);
    finish(os, path);
  };
  write_curve("e0.csv", "r0,e0", rep.e0_curve);
  write_curve("e2.csv", "k,e2", rep.e2_curve);

  goc::FoldPoint fold{std::numeric_limits<double>::quiet_NaN(), 0.0};
  {
    std::string const path = join(dir, "extrema.csv");
    auto os = open_out(path);
    os << head << '\n' << "beta,r0,kind\n" << std::setprecision(12);
    bool const geometry_ok = p.d > 0.0 && p.epsilon > 0.0 && p.epsilon <= p.d && p.lambda_c > 0.0;
    if (geometry_ok) {
      fold = goc::fold_point(p);
      double const ref = std::max(p.beta_c, std::isfinite(fold.beta) ? fold.beta : 0.0);
      auto betas = goc::linspace(0.25 * ref, 2.0 * ref, 36);
      betas.push_back(p.beta_c);
      std::sort(betas.begin(), betas.end());
      for (auto const& row : goc::extrema_scan(p, betas))
        for (auto const& e : row.extrema) os << row.beta << ',' << e.r0 << ',' << goc::to_string(e.kind) << '\n';
    }
    finish(os, path);
  }

  bool const valid = failure.empty();
  {
    std::string const path = join(dir, "report.txt");
    auto os = open_out(path);
    os << head << '\n' << std::setprecision(6);
    os << "lambda_c=" << p.lambda_c << "\nalpha_c=" << p.alpha_c << "\nd=" << p.d << "\nepsilon=" << p.epsilon
       << "\nr0_hat=" << p.r0_hat << '\n';
    os << "beta=" << p.beta_c << '\n';
    if (std::isfinite(fold.beta)) os << "fold_beta=" << fold.beta << "\nfold_r0=" << fold.r0 << '\n';
    os << "extrema=";
    for (std::size_t i = 0; i < rep.extrema.size(); ++i)
      os << (i ? ";" : "") << goc::to_string(rep.extrema[i].kind) << '@' << rep.extrema[i].r0;
    os << '\n';
    if (!rep.e2_curve.empty()) {
      auto const low = std::min_element(rep.e2_curve.begin(), rep.e2_curve.end(),
                                        [](auto const& a, auto const& b) { return a.second < b.second; });
      os << "e2_min=" << low->second << " at k=" << low->first << '\n';
    }
    os << "verdict=" << (valid ? "VALID" : "INVALID") << '\n';
    os << "reason=" << (valid ? rep.reason : failure) << '\n';
    finish(os, path);
  }
  std::cout << "beta=" << std::setprecision(6) << p.beta_c << " verdict=" << (valid ? "VALID" : "INVALID") << '\n';
  if (!valid) {
    std::cerr << "goc analyze: invalid parameters: " << failure << '\n';
    return kInvalid;
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct EvolveArgs {
  std::string init;
  std::string init_shape;
  std::string image;
  int snapshot_every = -1;
};

int run_evolve(Common const& c, EvolveArgs a) {
  auto const cfg = read_configs(c);
  auto rc = goc::to_run_config(cfg);
  if (a.init.empty()) a.init = rc.io.init;
  if (a.init_shape.empty()) a.init_shape = rc.io.init_shape;
  if (a.image.empty()) a.image = rc.io.image;
  if (a.snapshot_every < 0) a.snapshot_every = rc.snapshot_every;
  if (!a.init.empty() && !a.init_shape.empty())
    throw goc::InvalidParameters("give either an init mask or an init shape, not both");
  if (a.init.empty() && a.init_shape.empty() && a.image.empty())
    throw goc::InvalidParameters("evolve needs --init, --init-shape or --image");
  if (!a.image.empty() && !rc.has_likelihood) throw goc::InvalidParameters("--image needs likelihood.* parameters");
  goc::resolve_prior(rc);

  std::string const dir = out_dir(c, rc);
  std::string const note = goc::provenance_line(c.seed, rc.hash);
  double const band = rc.band();

  goc::SnapshotFn snap;
  int crop = 0, crop_w = 0, crop_h = 0;
  if (a.snapshot_every > 0) {
    snap = [&](int it, goc::LevelSetField const& f) {
      std::ostringstream name;
      name << "snapshot_" << std::setw(5) << std::setfill('0') << it << ".pgm";
      auto m = f.mask();
      if (crop > 0) m = goc::crop_mask(m, crop, crop_w, crop_h);
      goc::write_pgm(join(dir, name.str()), goc::to_pgm(m), note);
    };
  }

  goc::EvolveResult res;
  goc::Mask final_mask;
  if (!a.image.empty()) {
    auto const image = goc::to_image(goc::read_pgm(a.image));
    if (a.init.empty() && a.init_shape.empty()) {
      crop = rc.pad;
      crop_w = image.width;
      crop_h = image.height;
      auto ex = goc::extract_objects(image, rc.prior, rc.likelihood, rc.evolve, band, rc.pad, snap, a.snapshot_every);
      res = std::move(ex.evolution);
      final_mask = std::move(ex.mask);
    } else {
      goc::LevelSetField field;
      if (!a.init.empty()) {
        auto const m = goc::to_mask(goc::read_pgm(a.init));
        if (m.width != image.width || m.height != image.height)
          throw goc::InvalidParameters("init mask and image sizes differ");
        field = goc::init_from_mask(m, band);
      } else {
        auto const spec = goc::parse_shape_spec(a.init_shape);
        field = goc::init_shape(spec.shapes, image.width, image.height, band);
      }
      goc::DataTerm const data(image, rc.likelihood);
      res = goc::evolve(std::move(field), rc.prior, &data, rc.evolve, snap, a.snapshot_every);
      final_mask = res.field.mask();
    }
  } else {
    goc::LevelSetField field;
    if (!a.init.empty()) {
      field = goc::init_from_mask(goc::to_mask(goc::read_pgm(a.init)), band);
    } else {
      auto const spec = goc::parse_shape_spec(a.init_shape);
      if (spec.width <= 0 || spec.height <= 0)
        throw goc::InvalidParameters("shape spec without an image needs a WxH size token");
      field = goc::init_shape(spec.shapes, spec.width, spec.height, band);
    }
    res = goc::evolve(std::move(field), rc.prior, nullptr, rc.evolve, snap, a.snapshot_every);
    final_mask = res.field.mask();
  }

  goc::write_pgm(join(dir, "final_mask.pgm"), goc::to_pgm(final_mask), note);
  {
    std::string const path = join(dir, "log.csv");
    auto os = open_out(path);
    os << "# " << note << '\n';
    goc::write_log_csv(os, res.log);
    finish(os, path);
  }
  auto const comps = goc::label_components(final_mask);
  double const area = res.vanished ? 0.0 : goc::region_area(res.field);
  {
    std::string const path = join(dir, "summary.txt");
    auto os = open_out(path);
    os << "# " << note << '\n' << std::setprecision(8);
    os << "beta=" << rc.prior.beta_c << '\n'
       << "converged=" << (res.converged ? "true" : "false") << '\n'
       << "vanished=" << (res.vanished ? "true" : "false") << '\n'
       << "iterations=" << res.iterations << '\n'
       << "components=" << comps.sizes.size() << '\n'
       << "area=" << area << '\n'
       << "equivalent_radius=" << std::sqrt(area / goc::kPi) << '\n';
    finish(os, path);
  }
  std::cout << "converged=" << (res.converged ? "true" : "false") << " iterations=" << res.iterations
            << " components=" << comps.sizes.size() << " equivalent_radius=" << std::setprecision(6)
            << std::sqrt(area / goc::kPi) << '\n';
  if (!res.converged) {
    std::cerr << "goc evolve: no convergence after " << res.iterations << " iterations\n";
    return kNotConverged;
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct SynthArgs {
  std::string kind = "circles";
  double snr_db = std::numeric_limits<double>::quiet_NaN();
};

int run_synth(Common const& c, SynthArgs const& a) {
  auto const cfg = read_configs(c);
  auto const rc = goc::to_run_config(cfg);
  std::string const dir = out_dir(c, rc);
  std::string const note = goc::provenance_line(c.seed, rc.hash);
  auto write_truth = [&](std::string const& name, goc::SceneTruth const& t) {
    std::string const path = join(dir, name);
    auto os = open_out(path);
    os << "# " << note << '\n';
    goc::write_truth_csv(os, t);
    finish(os, path);
  };
  if (a.kind == "circles") {
    auto const [clean, truth] = goc::gen_circles(c.seed, rc.synth);
    goc::write_pgm(join(dir, "clean.pgm"), goc::to_pgm(clean), note);
    goc::write_pgm(join(dir, "truth_mask.pgm"), goc::to_pgm(goc::rasterize(truth)), note);
    write_truth("truth.csv", truth);
    if (!std::isnan(a.snr_db)) {
      auto const noisy = goc::rescale_unit(goc::add_noise(clean, a.snr_db, goc::noise_seed(c.seed, 0, 0)));
      goc::write_pgm(join(dir, "image.pgm"), goc::to_pgm(noisy), note);
    }
  } else if (a.kind == "dumbbell") {
    goc::DumbbellOptions const o;
    auto const images = goc::gen_dumbbell(o);
    for (std::size_t i = 0; i < images.size(); ++i) {
      std::string const stem = "dumbbell_" + std::to_string(static_cast<int>(o.bar_levels[i]));
      goc::write_pgm(join(dir, stem + ".pgm"), goc::to_pgm(images[i].first), note);
      write_truth(stem + "_truth.csv", images[i].second);
    }
  } else {
    throw goc::InvalidParameters("unknown --kind '" + a.kind + "' (circles or dumbbell)");
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct ScoreArgs {
  std::string mask;
  std::string truth;
  double r_target = 0.0;
  double snr_db = 0.0;
  std::string out;
};

int run_score(Common const& c, ScoreArgs a) {
  auto const cfg = read_configs(c);
  auto const rc = goc::to_run_config(cfg);
  if (a.mask.empty()) a.mask = rc.io.mask;
  if (a.truth.empty()) a.truth = rc.io.truth;
  if (a.mask.empty() || a.truth.empty()) throw goc::InvalidParameters("score needs --mask and --truth");
  auto const mask = goc::to_mask(goc::read_pgm(a.mask));
  std::ifstream ts(a.truth);
  if (!ts) throw goc::IoError("cannot open " + a.truth);
  auto truth = goc::read_truth_csv(ts);
  truth.width = mask.width;
  truth.height = mask.height;
  double r = a.r_target > 0.0 ? a.r_target : rc.r_target;
  if (!(r > 0.0))
    for (auto const& t : truth.circles) r = std::max(r, t.radius);
  auto const rep = goc::score(mask, truth, r);
  std::vector<goc::ReportRow> const rows{{a.snr_db, rep}};
  std::string const note = "# " + goc::provenance_line(c.seed, rc.hash);
  if (a.out.empty()) {
    std::cout << note << '\n';
    goc::write_report_csv(std::cout, rows);
  } else {
    auto os = open_out(a.out);
    os << note << '\n';
    goc::write_report_csv(os, rows);
    finish(os, a.out);
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct FitArgs {
  std::string image;
  std::string mask;
  double lambda_i = 0.0;
  std::string out;
};

int run_fit(Common const& c, FitArgs a) {
  auto const cfg = read_configs(c);
  auto const rc = goc::to_run_config(cfg);
  if (a.image.empty()) a.image = rc.io.image;
  if (a.mask.empty()) a.mask = rc.io.mask;
  if (a.image.empty() || a.mask.empty()) throw goc::InvalidParameters("fit needs --image and --mask");
  auto const img = goc::to_image(goc::read_pgm(a.image));
  auto const mask = goc::to_mask(goc::read_pgm(a.mask));
  auto const lik = goc::to_params(goc::fit(img, mask), a.lambda_i);
  auto const terms = goc::energy_terms(img, mask, lik);
  auto emit = [&](std::ostream& os) {
    os << "# " << goc::provenance_line(c.seed, rc.hash) << '\n';
    goc::write_likelihood_config(os, lik);
    os << std::setprecision(12) << "# interior_nll=" << terms.interior_nll
       << " background_nll=" << terms.background_nll << " gradient_term=" << terms.gradient_term << '\n';
  };
  if (a.out.empty()) {
    emit(std::cout);
  } else {
    auto os = open_out(a.out);
    emit(os);
    finish(os, a.out);
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct TaylorArgs {
  int modes = 8;
  std::vector<double> scales{0.04, 0.02, 0.01};
  int trials = 20;
  std::size_t vertices = 4096;
  double amplitude = 0.02;
  std::string out;
};

int run_taylor(Common const& c, TaylorArgs const& a) {
  goc::FlatConfig cfg;
  if (c.configs.empty()) {
    std::istringstream defaults(
        "prior.lambda_c = 1\nprior.alpha_c = 0.8\nprior.beta_c = auto\nprior.d = 1\nprior.epsilon = 1\n"
        "prior.r0_hat = 1\n");
    cfg.parse(defaults, "<default>");
  } else {
    cfg = read_configs(c);
  }
  auto rc = goc::to_run_config(cfg);
  goc::resolve_prior(rc);
  if (a.modes < 0 || a.trials < 1 || a.scales.size() < 2 || !(a.amplitude > 0.0))
    throw goc::InvalidParameters("taylor-check needs modes >= 0, trials >= 1, two or more scales");
  auto const& p = rc.prior;
  boost::random::mt19937_64 rng(c.seed);
  goc::TaylorModel const model(p, p.r0_hat, a.modes);

  std::ostringstream os;
  os << "# " << goc::provenance_line(c.seed, rc.hash) << '\n' << "trial,slope";
  for (double s : a.scales) os << ",residual_s" << s;
  os << '\n' << std::setprecision(12);
  double min_slope = std::numeric_limits<double>::infinity();
  for (int t = 0; t < a.trials; ++t) {
    auto const fp = goc::random_perturbation(rng, p.r0_hat, a.modes, a.amplitude * p.r0_hat);
    std::vector<double> res;
    for (double s : a.scales) res.push_back(goc::taylor_residual(fp, s, p, model, a.vertices).incremental);
    double const slope = goc::loglog_slope(a.scales, res);
    min_slope = std::min(min_slope, slope);
    os << t << ',' << slope;
    for (double r : res) os << ',' << r;
    os << '\n';
  }
  if (a.out.empty()) {
    std::cout << os.str();
  } else {
    auto f = open_out(a.out);
    f << os.str();
    finish(f, a.out);
  }
  std::cout << "min_slope=" << std::setprecision(6) << min_slope << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gas-of-circles higher-order active contours: stability analysis, level-set evolution, benchmarks"};
  app.set_version_flag("--version", std::string("goc ") + goc::kVersion);
  app.require_subcommand(1);

  Common common;

  auto* analyze = app.add_subcommand("analyze", "stability analysis of the prior parameters");
  add_common(analyze, common);

  EvolveArgs ea;
  auto* evolve = app.add_subcommand("evolve", "level-set gradient descent (prior only, or with --image)");
  add_common(evolve, common);
  evolve->add_option("--init", ea.init, "initial region mask (PGM)");
  evolve->add_option("--init-shape", ea.init_shape, "initial shapes, e.g. '128x128;circle:64,64,32'");
  evolve->add_option("--image", ea.image, "image (PGM)");
  evolve->add_option("--snapshot-every", ea.snapshot_every, "write the region every k iterations");

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "synthetic benchmark images");
  add_common(synth, common);
  synth->add_option("--kind", sa.kind, "circles or dumbbell")->check(CLI::IsMember({"circles", "dumbbell"}));
  synth->add_option("--snr-db", sa.snr_db, "add white Gaussian noise at this SNR (circles)");

  ScoreArgs sc;
  auto* score = app.add_subcommand("score", "score a result mask against a truth CSV");
  add_common(score, common, false);
  score->add_option("--mask", sc.mask, "result mask (PGM)");
  score->add_option("--truth", sc.truth, "truth CSV (cx,cy,r)");
  score->add_option("--r-target", sc.r_target, "radius of the target circles (default: largest truth radius)");
  score->add_option("--snr-db", sc.snr_db, "value of the snr_db column");
  score->add_option("--out", sc.out, "report CSV (default: stdout)");

  FitArgs fa;
  auto* fit = app.add_subcommand("fit", "fit the Gaussian likelihood to an image and a mask");
  add_common(fit, common, false);
  fit->add_option("--image", fa.image, "image (PGM)");
  fit->add_option("--mask", fa.mask, "object mask (PGM)");
  fit->add_option("--lambda-i", fa.lambda_i, "gradient term weight to write out");
  fit->add_option("--out", fa.out, "config fragment (default: stdout)");

  TaylorArgs ta;
  auto* taylor = app.add_subcommand("taylor-check", "compare the contour oracle with the energy expansion");
  add_common(taylor, common, false);
  taylor->add_option("--modes", ta.modes, "highest Fourier mode");
  taylor->add_option("--scales", ta.scales, "perturbation scales")->delimiter(',');
  taylor->add_option("--trials", ta.trials, "number of random perturbations");
  taylor->add_option("--vertices", ta.vertices, "polygon vertices");
  taylor->add_option("--amplitude", ta.amplitude, "sup amplitude of the base perturbation, in units of r0_hat");
  taylor->add_option("--out", ta.out, "per-trial CSV (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (CLI::CallForHelp const& e) {
    return app.exit(e);
  } catch (CLI::CallForAllHelp const& e) {
    return app.exit(e);
  } catch (CLI::CallForVersion const& e) {
    return app.exit(e);
  } catch (CLI::ParseError const& e) {
    app.exit(e);
    return kIo;
  }

  try {
    if (*analyze) return run_analyze(common);
    if (*evolve) return run_evolve(common, ea);
    if (*synth) return run_synth(common, sa);
    if (*score) return run_score(common, sc);
    if (*fit) return run_fit(common, fa);
    if (*taylor) return run_taylor(common, ta);
  } catch (goc::IoError const& e) {
    std::cerr << "goc: " << e.what() << '\n';
    return kIo;
  } catch (goc::ParseError const& e) {
    std::cerr << "goc: " << e.what() << '\n';
    return kIo;
  } catch (goc::QuadratureNotConverged const& e) {
    std::cerr << "goc: " << e.what() << '\n';
    return kNotConverged;
  } catch (goc::Error const& e) {
    std::cerr << "goc: invalid parameters: " << e.what() << '\n';
    return kInvalid;
  } catch (std::invalid_argument const& e) {
    std::cerr << "goc: invalid parameters: " << e.what() << '\n';
    return kInvalid;
  } catch (std::exception const& e) {
    std::cerr << "goc: " << e.what() << '\n';
    return kIo;
  }
  return kOk;
}
