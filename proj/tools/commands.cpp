#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <locale>
#include <ostream>

#include <CLI11.hpp>

#include "geoatt/cli.hpp"
#include "geoatt/errors.hpp"

namespace geoatt::cli {

namespace {

namespace fs = std::filesystem;

constexpr std::size_t kMaxPrintedDiagnostics = 20;
constexpr std::size_t kSvgPointsPerSeries = 2000;

class CsvWriter {
 public:
  explicit CsvWriter(const fs::path& path) : out_(path, std::ios::binary) {
    if (!out_) {
      throw std::runtime_error("cannot write " + path.string());
    }
    out_.imbue(std::locale::classic());
  }

  CsvWriter& field(std::string_view s) {
    sep();
    out_ << s;
    return *this;
  }
  CsvWriter& number(double v) {
    sep();
    out_ << format_number(v);
    return *this;
  }
  CsvWriter& quoted(std::string_view s) {
    sep();
    out_ << '"';
    for (char c : s) {
      out_ << c;
      if (c == '"') {
        out_ << '"';
      }
    }
    out_ << '"';
    return *this;
  }
  void end_row() {
    out_ << '\n';
    first_ = true;
  }
  void close() {
    out_.close();
    if (!out_) {
      throw std::runtime_error("write failed");
    }
  }

 private:
  void sep() {
    if (!first_) {
      out_ << ',';
    }
    first_ = false;
  }

  std::ofstream out_;
  bool first_ = true;
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  out.close();
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
}

void print_diagnostics(const std::vector<std::string>& diags,
                       std::ostream& err) {
  for (std::size_t i = 0; i < diags.size() && i < kMaxPrintedDiagnostics; ++i) {
    err << "note: " << diags[i] << '\n';
  }
  if (diags.size() > kMaxPrintedDiagnostics) {
    err << "note: " << diags.size() - kMaxPrintedDiagnostics
        << " more diagnostic(s) omitted\n";
  }
}

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

std::string svg_number(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v,
                               std::chars_format::fixed, 2);
  return std::string(buf, r.ptr);
}

// Time vs attitude error, logarithmic error axis.
std::string render_svg(const std::vector<Series>& series, double t_end) {
  constexpr double kW = 800, kH = 480, kL = 70, kR = 170, kT = 30, kB = 50;
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b"};
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const Series& s : series) {
    for (const auto& [t, v] : s.points) {
      if (v > 0.0 && std::isfinite(v)) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
  }
  if (!std::isfinite(lo)) {
    lo = 1e-3;
    hi = 1.0;
  }
  const int d_hi = static_cast<int>(std::ceil(std::log10(hi)));
  const int d_lo = std::max(static_cast<int>(std::floor(std::log10(lo))),
                            d_hi - 8);
  const int decades = std::max(1, d_hi - d_lo);
  const double pw = kW - kL - kR;
  const double ph = kH - kT - kB;
  const auto px = [&](double t) { return kL + pw * t / t_end; };
  const auto py = [&](double v) {
    const double l = std::clamp(std::log10(std::max(v, 1e-300)),
                                static_cast<double>(d_lo),
                                static_cast<double>(d_hi));
    return kT + ph * (d_hi - l) / decades;
  };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"480\" "
       "font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect width=\"800\" height=\"480\" fill=\"white\"/>\n";
  for (int d = d_lo; d <= d_lo + decades; ++d) {
    const std::string y = svg_number(py(std::pow(10.0, d)));
    s += "<line x1=\"" + svg_number(kL) + "\" y1=\"" + y + "\" x2=\"" +
         svg_number(kL + pw) + "\" y2=\"" + y +
         "\" stroke=\"#ddd\"/>\n<text x=\"" + svg_number(kL - 8) + "\" y=\"" +
         y + "\" text-anchor=\"end\" dominant-baseline=\"middle\">1e" +
         std::to_string(d) + "</text>\n";
  }
  for (int i = 0; i <= 6; ++i) {
    const double t = t_end * i / 6.0;
    const std::string x = svg_number(px(t));
    s += "<text x=\"" + x + "\" y=\"" + svg_number(kT + ph + 18) +
         "\" text-anchor=\"middle\">" + svg_number(t) + "</text>\n";
  }
  s += "<rect x=\"" + svg_number(kL) + "\" y=\"" + svg_number(kT) +
       "\" width=\"" + svg_number(pw) + "\" height=\"" + svg_number(ph) +
       "\" fill=\"none\" stroke=\"black\"/>\n";
  s += "<text x=\"" + svg_number(kL + pw / 2) + "\" y=\"" + svg_number(kH - 10) +
       "\" text-anchor=\"middle\">t (s)</text>\n";
  s += "<text x=\"16\" y=\"" + svg_number(kT + ph / 2) +
       "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
       svg_number(kT + ph / 2) + ")\">attitude error (deg)</text>\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kColors[i % std::size(kColors)];
    s += "<polyline fill=\"none\" stroke-width=\"1.2\" stroke=\"";
    s += color;
    s += "\" points=\"";
    for (const auto& [t, v] : series[i].points) {
      s += svg_number(px(t)) + "," + svg_number(py(v)) + " ";
    }
    s += "\"/>\n";
    const std::string y = svg_number(kT + 16 + 18.0 * static_cast<double>(i));
    s += "<line x1=\"" + svg_number(kW - kR + 12) + "\" y1=\"" + y +
         "\" x2=\"" + svg_number(kW - kR + 36) + "\" y2=\"" + y +
         "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n<text x=\"" +
         svg_number(kW - kR + 42) + "\" y=\"" + y +
         "\" dominant-baseline=\"middle\">" + series[i].name + "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

// Runs `body` and maps library exceptions onto the exit-code contract.
template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const ParseError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ValidationError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const SimulationError& e) {
    err << "runtime failure: " << e.what() << '\n'
        << "seed " << e.seed() << ", step " << e.step() << '\n';
    return kRuntimeFailure;
  } catch (const std::exception& e) {
    err << "runtime failure: " << e.what() << '\n';
    return kRuntimeFailure;
  }
}

void prepare_output(const Invocation& inv, const ScenarioConfig& cfg) {
  fs::create_directories(inv.output_dir);
  write_text(inv.output_dir / "config.resolved.ini", format_config(cfg));
}

}  // namespace

unsigned threads_from_env() {
  const char* v = std::getenv("GEOATT_THREADS");
  if (v == nullptr || *v == '\0') {
    return 0;
  }
  unsigned n = 0;
  const std::string_view s(v);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ValidationError("GEOATT_THREADS must be a non-negative integer, got '" +
                          std::string(s) + "'");
  }
  return n;
}

int cmd_simulate(const Invocation& inv, std::ostream& err) {
  ScenarioConfig cfg;
  const int rc = guarded(err, [&] {
    cfg = load_config(inv.config_path, inv.overrides);
    prepare_output(inv, cfg);
    return kSuccess;
  });
  if (rc != kSuccess) {
    return rc;
  }
  return guarded(err, [&] {
    CsvWriter run(inv.output_dir / "run.csv");
    CsvWriter truth(inv.output_dir / "truth.csv");
    run.field("t").field("filter").field("att_err_deg").field("bias_err_degps")
        .field("lyapunov").field("pmin").field("pmax").end_row();
    truth.field("t");
    for (const char* n : {"r11", "r12", "r13", "r21", "r22", "r23", "r31",
                          "r32", "r33", "beta_x", "beta_y", "beta_z",
                          "triad_err_deg"}) {
      truth.field(n);
    }
    truth.end_row();

    const long steps = std::lround(cfg.duration / cfg.dt);
    const long stride = std::max<long>(
        1, (steps + 1) / static_cast<long>(kSvgPointsPerSeries));
    std::vector<Series> series(cfg.filters.size());
    for (std::size_t i = 0; i < cfg.filters.size(); ++i) {
      series[i].name = std::string(to_string(cfg.filters[i]));
    }

    const auto diags = run_scenario(cfg, [&](const StepView& v) {
      for (std::size_t i = 0; i < v.filters.size(); ++i) {
        const FilterSnapshot& f = v.filters[i];
        run.number(v.t).field(series[i].name).number(f.att_err_deg)
            .number(f.bias_err_degps).number(f.lyapunov).number(f.pmin)
            .number(f.pmax).end_row();
        if (inv.svg && (v.step % stride == 0 || v.step == steps)) {
          series[i].points.emplace_back(v.t, f.att_err_deg);
        }
      }
      truth.number(v.t);
      const Mat3& r = v.truth->r.matrix();
      for (int row = 0; row < 3; ++row) {
        for (int col = 0; col < 3; ++col) {
          truth.number(r(row, col));
        }
      }
      truth.number(v.truth->beta.x()).number(v.truth->beta.y())
          .number(v.truth->beta.z()).number(v.triad_err_deg).end_row();
    });
    run.close();
    truth.close();
    if (inv.svg) {
      write_text(inv.output_dir / "run.svg", render_svg(series, cfg.duration));
    }
    print_diagnostics(diags, err);
    return kSuccess;
  });
}

int cmd_montecarlo(const Invocation& inv, std::ostream& err) {
  ScenarioConfig cfg;
  unsigned threads = 0;
  const int rc = guarded(err, [&] {
    cfg = load_config(inv.config_path, inv.overrides);
    threads = threads_from_env();
    prepare_output(inv, cfg);
    return kSuccess;
  });
  if (rc != kSuccess) {
    return rc;
  }
  return guarded(err, [&] {
    const MonteCarloSummary sum = monte_carlo(cfg, cfg.n_runs, threads);
    CsvWriter out(inv.output_dir / "summary.csv");
    out.field("filter").field("metric").field("transient").field("steady")
        .field("n_runs").field("seed").end_row();
    const std::string n = std::to_string(sum.n_runs);
    const std::string seed = std::to_string(sum.seed);
    for (const FilterMetrics& f : sum.filters) {
      const std::string name(to_string(f.kind));
      out.field(name).field("attitude_deg").number(f.attitude_deg.transient)
          .number(f.attitude_deg.steady).field(n).field(seed).end_row();
      out.field(name).field("bias_degps").number(f.bias_degps.transient)
          .number(f.bias_degps.steady).field(n).field(seed).end_row();
    }
    out.field("triad").field("attitude_deg").number(sum.triad_deg.transient)
        .number(sum.triad_deg.steady).field(n).field(seed).end_row();
    out.close();
    print_diagnostics(sum.diagnostics, err);
    return kSuccess;
  });
}

int cmd_verify(const Invocation& inv, std::ostream& err,
               const VerifyOptions& options) {
  return guarded(err, [&] {
    fs::create_directories(inv.output_dir);
    const VerifyReport rep = run_verification(options);
    CsvWriter out(inv.output_dir / "verify_report.csv");
    out.field("check").field("passed").field("max_residual").field("tolerance")
        .field("seconds").field("detail").end_row();
    for (const CheckResult& c : rep.checks) {
      out.field(c.name).field(c.passed ? "pass" : "fail")
          .number(c.max_residual).number(c.tolerance).number(c.seconds)
          .quoted(c.detail).end_row();
    }
    out.close();
    if (const CheckResult* bad = rep.first_failure()) {
      err << "verification failed: " << bad->name << " (residual "
          << format_number(bad->max_residual) << ", tolerance "
          << format_number(bad->tolerance) << ")\n";
      return kVerificationFailure;
    }
    return kSuccess;
  });
}

int run(int argc, char** argv) {
  CLI::App app{"Geometric attitude and gyro-bias estimation toolkit"};
  app.require_subcommand(1);
  Invocation inv;
  std::vector<std::string> sets;

  const auto common = [&](CLI::App* sub) {
    sub->add_option("--config,-c", inv.config_path, "Configuration file")
        ->check(CLI::ExistingFile);
    sub->add_option("--out,-o", inv.output_dir, "Output directory");
    sub->add_option("--set,-s", sets, "Override, key=value (repeatable)");
  };
  CLI::App* simulate =
      app.add_subcommand("simulate", "Single run: run.csv, truth.csv");
  common(simulate);
  simulate->add_flag("--svg", inv.svg, "Also write run.svg");
  CLI::App* montecarlo =
      app.add_subcommand("montecarlo", "Monte-Carlo RMS summary");
  common(montecarlo);
  CLI::App* verify = app.add_subcommand("verify", "Run the oracle suite");
  verify->add_option("--out,-o", inv.output_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  for (const std::string& s : sets) {
    try {
      inv.overrides.push_back(parse_override(s));
    } catch (const ParseError& e) {
      std::cerr << "configuration error: " << e.what() << '\n';
      return kConfigError;
    }
  }
  if (simulate->parsed()) {
    inv.command = "simulate";
    return cmd_simulate(inv, std::cerr);
  }
  if (montecarlo->parsed()) {
    inv.command = "montecarlo";
    return cmd_montecarlo(inv, std::cerr);
  }
  inv.command = "verify";
  return cmd_verify(inv, std::cerr);
}

}  // namespace geoatt::cli
