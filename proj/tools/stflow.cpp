#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "stflow/analytic1d.hpp"
#include "stflow/baselines.hpp"
#include "stflow/flow_io.hpp"
#include "stflow/solver.hpp"
#include "stflow/synth.hpp"
#include "stflow/verify.hpp"

namespace fs = std::filesystem;
using namespace stflow;

namespace {

constexpr int kOk = 0;
constexpr int kVerifyFailed = 1;
constexpr int kUsage = 2;
constexpr int kDiverged = 3;

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_manifest(const fs::path& dir, const std::map<std::string, std::string>& entries) {
  std::string text;
  for (const auto& [k, v] : entries) text += k + "=" + v + "\n";
  io::atomic_write(dir / "manifest.txt", text);
}

// ---------------------------------------------------------------------------
// synth

struct SynthArgs {
  std::string out;
  int size = 48;
  int frames = 16;
  int freq = 1;
  unsigned seed = 0;
  int repeats = 4;
  int flicker_frames = 0;
  double amplitude = 0.05;
  double speed = 1.0;
  std::string scene = "darkening";
  double beta = 0.75;
  int n0 = 2;
};

int finish_synth(const SynthArgs& a, const std::string& generator, const ScalarField3& f,
                 std::map<std::string, std::string> params) {
  const fs::path dir(a.out);
  const auto files = io::write_sequence(f, dir);
  params["generator"] = generator;
  params["grid"] = f.grid().describe();
  params["frames"] = std::to_string(files.size());
  write_manifest(dir, params);
  std::cout << "wrote " << files.size() << " frames to " << dir.string() << "\n";
  return kOk;
}

void add_synth(CLI::App& app, SynthArgs& a, int& rc) {
  CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic image sequence");
  synth->require_subcommand(1);

  CLI::App* rotate = synth->add_subcommand("rotate", "Rotating textured disc");
  rotate->add_option("--out", a.out, "Output directory")->required();
  rotate->add_option("--size", a.size, "Frame width and height")->check(CLI::Range(3, 4096));
  rotate->add_option("--frames", a.frames, "Number of frames")->check(CLI::Range(3, 100000));
  rotate->add_option("--freq", a.freq, "Full turns over the sequence")->check(CLI::PositiveNumber);
  rotate->add_option("--seed", a.seed, "Texture seed");
  rotate->callback([&] {
    const unsigned seed = a.seed ? a.seed : 7;
    const ScalarField3 f = synth::gen_periodic_motion(
        GridSpec(a.size, a.size, a.frames), synth::textured_disc_pattern(a.size, a.size, seed), a.freq);
    rc = finish_synth(a, "rotate", f,
                      {{"freq", std::to_string(a.freq)}, {"seed", std::to_string(seed)}});
  });

  CLI::App* square = synth->add_subcommand("square", "Square over an oscillating background");
  square->add_option("--out", a.out, "Output directory")->required();
  square->add_option("--size", a.size, "Frame width and height")->check(CLI::Range(3, 4096));
  square->add_option("--frames", a.frames, "Number of frames")->check(CLI::Range(3, 100000));
  square->add_option("--amplitude", a.amplitude, "Background step per frame, fraction of size");
  square->add_option("--speed", a.speed, "Square speed in pixels per frame");
  square->add_option("--seed", a.seed, "Texture seed");
  square->callback([&] {
    synth::SquareSceneParams p;
    p.bg_amplitude = a.amplitude;
    p.square_speed = a.speed;
    if (a.seed) p.seed = a.seed;
    std::vector<std::string> warnings;
    const ScalarField3 f =
        synth::gen_square_over_oscillating_bg(GridSpec(a.size, a.size, a.frames), p, nullptr, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    rc = finish_synth(a, "square", f,
                      {{"amplitude", num(p.bg_amplitude)},
                       {"speed", num(p.square_speed)},
                       {"seed", std::to_string(p.seed)}});
  });

  CLI::App* flicker = synth->add_subcommand("flicker", "Two images alternating with blank frames");
  flicker->add_option("--out", a.out, "Output directory")->required();
  flicker->add_option("--size", a.size, "Frame width and height")->check(CLI::Range(3, 4096));
  flicker->add_option("--repeats", a.repeats, "Number of image/blank/image/blank cycles")
      ->check(CLI::PositiveNumber);
  flicker->add_option("--frames", a.flicker_frames,
                      "Resample the raw cycle to this many frames (0 keeps 4 * repeats)")
      ->check(CLI::NonNegativeNumber);
  flicker->add_option("--seed", a.seed, "Texture seed");
  flicker->callback([&] {
    synth::FlickerFrameParams p;
    if (a.seed) p.seed = a.seed;
    const auto fr = synth::make_flicker_frames(a.size, a.size, p);
    const ScalarField3 f = synth::gen_flicker(fr.frame1, fr.frame2, a.repeats, a.flicker_frames);
    rc = finish_synth(a, "flicker", f,
                      {{"repeats", std::to_string(a.repeats)},
                       {"seed", std::to_string(p.seed)},
                       {"changed_rect", std::to_string(fr.changed.x0) + "," + std::to_string(fr.changed.y0) +
                                            "," + std::to_string(fr.changed.w) + "," +
                                            std::to_string(fr.changed.h)}});
  });

  CLI::App* separable = synth->add_subcommand("separable", "Static profile under global brightness change");
  separable->add_option("--out", a.out, "Output directory")->required();
  separable->add_option("--size", a.size, "Frame width and height")->check(CLI::Range(3, 4096));
  separable->add_option("--frames", a.frames, "Number of frames")->check(CLI::Range(3, 100000));
  separable->add_option("--scene", a.scene, "darkening | power | flicker")
      ->check(CLI::IsMember({"darkening", "power", "flicker"}));
  separable->add_option("--beta", a.beta, "Exponent of the power scene");
  separable->add_option("--n0", a.n0, "Flicker frequency")->check(CLI::PositiveNumber);
  separable->callback([&] {
    analytic1d::SeparableScene1D scene = a.scene == "power"     ? analytic1d::power_law_scene(a.beta)
                                         : a.scene == "flicker" ? analytic1d::flicker_scene_ramp(a.n0)
                                                                : analytic1d::darkening_scene();
    const ScalarField3 f = synth::gen_separable(GridSpec(a.size, a.size, a.frames), scene);
    rc = finish_synth(a, "separable", f,
                      {{"scene", scene.name}, {"beta", num(a.beta)}, {"n0", std::to_string(a.n0)}});
  });
}

// ---------------------------------------------------------------------------
// decompose / compare

struct SolveArgs {
  std::string in;
  std::string out;
  SolverConfig config;
};

void add_solver_flags(CLI::App* cmd, SolveArgs& a) {
  cmd->add_option("--in", a.in, "Directory of PGM/PNG frames")->required();
  cmd->add_option("--alpha1", a.config.alpha1, "Weight of the smooth module");
  cmd->add_option("--alpha2", a.config.alpha2, "Weight of the oscillating module");
  cmd->add_option("--dtau", a.config.dtau, "Pseudo time step");
  cmd->add_option("--tol", a.config.tol, "Relative change tolerance");
  cmd->add_option("--max-iter", a.config.max_iter, "Iteration cap");
  cmd->add_option("--eps", a.config.eps_nu, "Penaliser slope far from zero");
  cmd->add_option("--lambda", a.config.lambda, "Penaliser contrast parameter");
}

double sup_norm(const FlowComponent& u) {
  double m = 0.0;
  for (std::size_t i = 0; i < u.u1.size(); ++i) m = std::max(m, std::hypot(u.u1[i], u.u2[i]));
  return m;
}

ScalarField3 load_input(const std::string& dir) { return io::read_sequence(io::list_frames(dir)); }

int run_decompose(const SolveArgs& a) {
  a.config.validate();
  const ScalarField3 f = load_input(a.in);
  const DecompositionResult r = decompose(f, a.config);
  const fs::path out(a.out);
  fs::create_directories(out);
  const FlowComponent total = sum(r.u1, r.u2);
  for (int t = 0; t < f.grid().T(); ++t) {
    char suffix[32];
    std::snprintf(suffix, sizeof(suffix), "_t%04d.flo", t + 1);
    io::write_flo(io::slice(r.u1, t), out / ("u1" + std::string(suffix)));
    io::write_flo(io::slice(r.u2, t), out / ("u2" + std::string(suffix)));
    io::write_flo(io::slice(total, t), out / ("sum" + std::string(suffix)));
  }
  std::string csv = "iteration,energy,residual\n";
  for (std::size_t k = 0; k < r.energy_history.size(); ++k)
    csv += std::to_string(k + 1) + "," + num(r.energy_history[k]) + "," + num(r.residual_history[k]) + "\n";
  io::atomic_write(out / "report.csv", csv);

  const double s1 = sup_norm(r.u1), s2 = sup_norm(r.u2);
  std::cout << "iterations=" << r.iterations << "\n"
            << "stop_reason=" << to_string(r.stop_reason) << "\n"
            << "energy=" << num(r.energy_history.empty() ? 0.0 : r.energy_history.back()) << "\n"
            << "data_residual=" << num(r.data_residual) << "\n"
            << "sup_u1=" << num(s1) << "\n"
            << "sup_u2=" << num(s2) << "\n";
  return kOk;
}

int run_compare(const SolveArgs& a) {
  a.config.validate();
  const ScalarField3 f = load_input(a.in);
  const DecompositionResult dec = decompose(f, a.config);
  const DecompositionResult ws = weickert_schnoerr_run(f, WeickertSchnoerrParams::from(a.config));
  const double ratio = (dec.data_residual == 0.0 && ws.data_residual == 0.0)
                           ? 1.0
                           : dec.data_residual / ws.data_residual;
  std::cout << "residual_weickert_schnoerr=" << num(ws.data_residual) << "\n"
            << "residual_decomposition=" << num(dec.data_residual) << "\n"
            << "ratio=" << num(ratio) << "\n"
            << "u2_energy=" << num(l2_norm_sq(dec.u2)) << "\n"
            << "iterations_weickert_schnoerr=" << ws.iterations << "\n"
            << "iterations_decomposition=" << dec.iterations << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// render

struct RenderArgs {
  std::string flo;
  std::string mode = "color";
  double threshold = 0.18;
  std::string mask_common;
  std::string out;
};

int run_render(const RenderArgs& a) {
  io::FlowSlice s = io::read_flo(a.flo);
  if (!a.mask_common.empty()) s = io::mask_common(s, io::read_flo(a.mask_common), a.threshold);
  if (a.mode == "color") {
    io::write_png(io::render_color(s), a.out);
  } else {
    io::write_png(io::render_magnitude(s, a.threshold), a.out);
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// verify

int run_verify(const verify::Options& o) {
  const auto results = verify::run(o);
  int failed = 0;
  for (const auto& r : results) {
    std::cout << verify::format(r) << "\n";
    if (!r.pass) ++failed;
  }
  std::cout << (failed ? "FAILED " : "ALL PASSED ") << results.size() - failed << "/" << results.size()
            << "\n";
  return failed ? kVerifyFailed : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spatio-temporal optical flow decomposition u = u1 + u2"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  int rc = kOk;
  SynthArgs synth_args;
  add_synth(app, synth_args, rc);

  SolveArgs dec_args;
  CLI::App* dec = app.add_subcommand("decompose", "Decompose the flow of a frame sequence");
  add_solver_flags(dec, dec_args);
  dec->add_option("--out", dec_args.out, "Output directory")->required();

  SolveArgs cmp_args;
  cmp_args.config.alpha1 = 100.0;
  cmp_args.config.alpha2 = 0.25;
  cmp_args.config.tol = 0.01;
  CLI::App* cmp = app.add_subcommand("compare", "Residuals of the decomposition vs. single-flow model");
  add_solver_flags(cmp, cmp_args);

  RenderArgs ren_args;
  CLI::App* ren = app.add_subcommand("render", "Render a .flo slice to PNG");
  ren->add_option("--flo", ren_args.flo, "Input .flo file")->required();
  ren->add_option("--mode", ren_args.mode, "color | magnitude")->check(CLI::IsMember({"color", "magnitude"}));
  ren->add_option("--threshold", ren_args.threshold, "Magnitude threshold")->check(CLI::NonNegativeNumber);
  ren->add_option("--mask-common", ren_args.mask_common, "Hide pixels where this flow also exceeds the threshold");
  ren->add_option("--out", ren_args.out, "Output PNG")->required();

  verify::Options ver_args;
  CLI::App* ver = app.add_subcommand("verify", "Run the invariant checks");
  ver->add_option("--only", ver_args.only, "Run one check or group");
  ver->add_option("--beta", ver_args.beta, "Exponent for the norm study")->check(CLI::Range(0.0, 1.0));

  try {
    app.parse(argc, argv);
    if (dec->parsed()) return run_decompose(dec_args);
    if (cmp->parsed()) return run_compare(cmp_args);
    if (ren->parsed()) return run_render(ren_args);
    if (ver->parsed()) return run_verify(ver_args);
    return rc;
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  } catch (const DivergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDiverged;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
}
