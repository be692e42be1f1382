#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "sparsecirc/cli.hpp"
#include "sparsecirc/errors.hpp"
#include "sparsecirc/io.hpp"

using namespace sparsecirc;
namespace fs = std::filesystem;

namespace {

std::size_t count(const std::string& s, const std::string& needle) {
  std::size_t k = 0;
  for (std::size_t p = 0; (p = s.find(needle, p)) != std::string::npos; p += needle.size()) ++k;
  return k;
}

std::size_t error_line(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  FAIL("expected a ConfigError");
  return 0;
}

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("sparsecirc-test-" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name) << text;
    return path / name;
  }
};

struct CliResult {
  int code;
  std::string out, err;
};

CliResult cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("config parsing") {
  SUBCASE("minimal config fills defaults") {
    const auto c = parse_config("experiment=circular-law\nn_values=200,500");
    CHECK(c.experiment == ExperimentId::CircularLaw);
    CHECK(c.n_values == std::vector<std::size_t>{200, 500});
    CHECK(c.trials == 5);
    CHECK(c.effective_alpha() == 0.4);
    CHECK(c.atom == Atom::BernoulliPM1);
    CHECK(c.shift.kind == ShiftKind::Zero);
  }
  SUBCASE("sections, comments and whitespace") {
    const auto d = parse_config_document(
        "# header comment\n"
        "[experiment]\n"
        "experiment = logdet-convergence   # trailing comment\n"
        "n_values = 100, 200 ,400\n"
        "trials = 10\n"
        "z_probe = 1,1\n"
        "\n"
        "[ensemble]\n"
        "atom = complex-gaussian\n"
        "reference_atom = gaussian\n"
        "alpha = 0.5\n"
        "shift = custom-diag\n"
        "shift_values = 1,0; 0,-1\n"
        "[output]\n"
        "directory = results\n"
        "spectra = true\n");
    CHECK(d.run.experiment == ExperimentId::LogdetConvergence);
    CHECK(d.run.n_values == std::vector<std::size_t>{100, 200, 400});
    CHECK(d.run.z_probe == Complex(1, 1));
    CHECK(d.run.atom == Atom::ComplexGaussian);
    CHECK(d.run.reference_atom == Atom::RealGaussian);
    CHECK(d.run.shift.values == std::vector<Complex>{Complex(1, 0), Complex(0, -1)});
    CHECK(d.output.directory == "results");
    CHECK(d.output.spectra);
  }
  SUBCASE("range errors carry the line") {
    CHECK(error_line("n_values=10\nalpha=0\n") == 2);
    CHECK(error_line("n_values=10\nalpha=1.5\n") == 2);
    CHECK(error_line("alpha=-1\nn_values=10\n") == 1);
    CHECK(error_line("n_values=10\n\n\ntrials=0\n") == 4);
    CHECK(error_line("n_values=10,5\n") == 1);
    CHECK(error_line("n_values=10\nc_probe=1\n") == 2);
    CHECK(error_line("n_values=10\nz_probe=4\n") == 2);
    CHECK(error_line("n_values=10\nalpha=abc\n") == 2);
    CHECK(error_line("n_values=10\ntrials=-3\n") == 2);
  }
  SUBCASE("structural errors") {
    CHECK(error_line("n_values=10\nbogus=1\n") == 2);
    CHECK(error_line("n_values=10\nn_values=20\n") == 2);
    CHECK(error_line("[ensemble]\nn_values=10\n") == 2);
    CHECK(error_line("n_values=10\n[plots]\n") == 2);
    CHECK(error_line("n_values=10\njust text\n") == 2);
    CHECK(error_line("n_values=10\natom=\n") == 2);
    CHECK(error_line("n_values=10\nexperiment=nope\n") == 2);
    CHECK(error_line("n_values=10\nshift_values=1,0\n") == 2);
    CHECK(error_line("experiment=circular-law\n") == 0);
  }
  SUBCASE("cross-field errors point at the relevant key") {
    CHECK(error_line("experiment=distance-concentration\nn_values=400\nd_fraction=0.5\n") == 3);
    CHECK(error_line("experiment=distance-concentration\nn_values=5\nd_fraction=0.8\n") == 3);
  }
  SUBCASE("format round trip") {
    RunConfig c;
    c.experiment = ExperimentId::Universality;
    c.n_values = {10, 30};
    c.alpha = 0.1 + 0.2;
    c.reference_atom = Atom::ComplexBernoulli;
    c.z_probe = Complex(0.1, -2.5);
    c.baseline = 0.0123456789012345;
    c.master_seed = 18446744073709551615ULL;
    c.shift = ShiftPattern::custom({Complex(1.0 / 3.0, 2), Complex(0, -1)});
    c.scaling = SparseScaling::Mean;
    OutputSettings o{"x/y", true};
    const auto d = parse_config_document(format_config(c, o));
    CHECK(d.run == c);
    CHECK(d.output == o);
    RunConfig plain;
    plain.n_values = {5};
    CHECK(parse_config(format_config(plain)) == plain);
  }
}

TEST_CASE("eigenvalue CSV") {
  SUBCASE("normative format") {
    CHECK(format_eigenvalues_csv(Esd({Complex(1, 2)})) == "re,im\n1.0000000000000000e0,2.0000000000000000e0\n");
    // Expected strings come from printf("%.16e") on the same doubles, exponent stripped.
    CHECK(format_scientific(-0.000123) == "-1.2300000000000001e-4");
    CHECK(format_scientific(1e300) == "1.0000000000000001e300");
    CHECK(format_scientific(-std::ldexp(1.0, -12)) == "-2.4414062500000000e-4");
    CHECK(format_scientific(0.0) == "0.0000000000000000e0");
  }
  SUBCASE("rows sorted by real then imaginary part") {
    const auto text = format_eigenvalues_csv(Esd({Complex(2, 0), Complex(1, 5), Complex(1, -5)}));
    CHECK(text ==
          "re,im\n1.0000000000000000e0,-5.0000000000000000e0\n1.0000000000000000e0,5.0000000000000000e0\n"
          "2.0000000000000000e0,0.0000000000000000e0\n");
  }
  SUBCASE("lossless round trip") {
    std::mt19937_64 gen(9);
    std::normal_distribution<double> g(0, 1e3);
    std::vector<Complex> pts;
    for (int k = 0; k < 500; ++k) pts.emplace_back(g(gen) * std::exp(g(gen) / 100), g(gen));
    pts.emplace_back(5e-324, -0.0);
    std::sort(pts.begin(), pts.end(),
              [](Complex a, Complex b) { return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag(); });
    const Esd e(pts);
    CHECK(parse_eigenvalues_csv(format_eigenvalues_csv(e)) == e);
    TempDir dir;
    write_eigenvalues_csv(e, dir.path / "e.csv");
    CHECK(read_eigenvalues_csv(dir.path / "e.csv") == e);
  }
  SUBCASE("malformed input") {
    CHECK_THROWS_AS(parse_eigenvalues_csv("x,y\n1,2\n"), ParseError);
    CHECK_THROWS_AS(parse_eigenvalues_csv("re,im\n"), ParseError);
    CHECK_THROWS_AS(parse_eigenvalues_csv(""), ParseError);
    try {
      parse_eigenvalues_csv("re,im\n1,2\n3,four\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
    }
    CHECK_THROWS_AS(parse_eigenvalues_csv("re,im\n1,2,3\n"), ParseError);
  }
  SUBCASE("I/O errors name the path") {
    try {
      write_eigenvalues_csv(Esd({1.0}), "/nonexistent-dir/x.csv");
      FAIL("expected IoError");
    } catch (const IoError& e) {
      CHECK(e.path() == "/nonexistent-dir/x.csv");
    }
    CHECK_THROWS_AS(read_eigenvalues_csv("/nonexistent-dir/x.csv"), IoError);
  }
}

TEST_CASE("scatter SVG") {
  FigureSpec spec;
  SUBCASE("one point gives one marker") {
    const auto svg = render_scatter_svg(spec, Esd({Complex(0.5, 0.5)}));
    CHECK(count(svg, "<circle class=\"marker\"") == 1);
    CHECK(count(svg, "class=\"reference\"") == 0);
    CHECK(svg.find("version=\"1.1\"") != std::string::npos);
    CHECK(svg.rfind("</svg>\n") == svg.size() - 7);
  }
  SUBCASE("overlay draws one unit circle") {
    spec.overlay = true;
    spec.x_lo = -2;
    spec.x_hi = 2;
    const auto svg = render_scatter_svg(spec, Esd({0.0, 1.0}));
    CHECK(count(svg, "class=\"reference\"") == 1);
    // Plot width 520 px over 4 data units.
    CHECK(svg.find("class=\"reference\" cx=\"300.000\" cy=\"") != std::string::npos);
    CHECK(svg.find("r=\"130.000\" fill=\"none\"") != std::string::npos);
  }
  SUBCASE("deterministic, order independent") {
    spec.title = "a < b & \"c\"";
    const Esd a({Complex(0.1, 0.2), Complex(-0.3, 0.4), Complex(0.1, -0.2)});
    const Esd b({Complex(0.1, -0.2), Complex(0.1, 0.2), Complex(-0.3, 0.4)});
    CHECK(render_scatter_svg(spec, a) == render_scatter_svg(spec, b));
    CHECK(render_scatter_svg(spec, a).find("a &lt; b &amp; &quot;c&quot;") != std::string::npos);
  }
  SUBCASE("bad bounds") {
    spec.x_hi = spec.x_lo;
    CHECK_THROWS_AS(render_scatter_svg(spec, Esd({0.0})), ContractError);
  }
  SUBCASE("fraction outside") {
    CHECK(fraction_outside(Esd({0.0, 2.0, Complex(0, 1.2), 0.5}), 1.1) == 0.5);
  }
  SUBCASE("figure spec parsing") {
    const auto f = parse_figure_spec("source = e.csv\noverlay = true\ntitle = Sparse Bernoulli\nx_lo=-2\n", "/base");
    CHECK(f.source == fs::path("/base/e.csv"));
    CHECK(f.overlay);
    CHECK(f.title == "Sparse Bernoulli");
    CHECK(f.x_lo == -2.0);
    CHECK_THROWS_AS(parse_figure_spec("overlay = true\n"), ParseError);
    CHECK_THROWS_AS(parse_figure_spec("source = a\nwidth = 3\n"), ParseError);
    CHECK_THROWS_AS(parse_figure_spec("source = a\nx_lo = 2\n"), ParseError);
  }
}

TEST_CASE("report format") {
  RunConfig c;
  c.n_values = {12, 16};
  c.trials = 2;
  const auto r = run_experiment(c);
  const auto text = format_report(r);
  CHECK(text.rfind("provenance version=\"sparsecirc 1.0.0\"\n", 0) == 0);
  CHECK(count(text, "\nrecord ") == 4);
  CHECK(count(text, "\nsummary ") == 2);
  CHECK(text.find("config experiment=circular-law n_values=12,16 trials=2") != std::string::npos);
  CHECK(text.find("flag id=monotone-decay criterion=AC4 state=") != std::string::npos);
  CHECK(text.find("exceptions count=0 trials=4\n") != std::string::npos);
  for (char ch : text) CHECK(((ch >= 32 && ch < 127) || ch == '\n'));
}

TEST_CASE("command line") {
  TempDir dir;
  SUBCASE("list") {
    const auto r = cli({"list"});
    CHECK(r.code == kExitOk);
    CHECK(count(r.out, "\n") == experiment_catalog().size());
    for (const auto& e : experiment_catalog()) CHECK(r.out.find(std::string(e.name) + "\t") != std::string::npos);
  }
  SUBCASE("usage errors exit 2") {
    CHECK(cli({}).code == kExitUsage);
    CHECK(cli({"frobnicate"}).code == kExitUsage);
    CHECK(cli({"run"}).code == kExitUsage);
    CHECK(cli({"run", "missing.cfg"}).code == kExitUsage);
    CHECK(cli({"list", "--bogus"}).code == kExitUsage);
    CHECK(cli({"figure", (dir.path / "none.fig").string()}).code == kExitUsage);
    const auto bad = dir.write("bad.cfg", "n_values=10\nalpha=0\n");
    const auto r = cli({"run", bad.string()});
    CHECK(r.code == kExitUsage);
    CHECK(r.err.find("line 2") != std::string::npos);
    const auto shifted = dir.write("shift.cfg", "n_values=10\nshift=univ-diag\n");
    CHECK(cli({"run", shifted.string()}).code == kExitUsage);
    const auto ok = dir.write("ok.cfg", "n_values=10\ntrials=1\n");
    CHECK(cli({"run", ok.string(), "--workers", "0"}).code == kExitUsage);
    CHECK(cli({"run", ok.string(), "--seed", "abc"}).code == kExitUsage);
  }
  SUBCASE("help exits 0") { CHECK(cli({"--help"}).code == kExitOk); }
  SUBCASE("run writes the report and spectra, --seed overrides") {
    const auto cfg = dir.write("c.cfg", "experiment=circular-law\nn_values=10,20\ntrials=2\n[output]\ndirectory=" +
                                            (dir.path / "out").string() + "\nspectra=true\n");
    const auto r = cli({"run", cfg.string(), "--workers", "2"});
    CHECK((r.code == kExitOk || r.code == kExitAssertion));
    const auto report = dir.path / "out" / "circular-law.report";
    REQUIRE(fs::exists(report));
    CHECK(fs::exists(dir.path / "out" / "spectra" / "n20_t1_sparse.csv"));
    CHECK(read_eigenvalues_csv(dir.path / "out" / "spectra" / "n10_t0_sparse.csv").n() == 10);
    std::ifstream in(report);
    const std::string first((std::istreambuf_iterator<char>(in)), {});
    cli({"run", cfg.string(), "--seed", "77", "--out", (dir.path / "seeded").string()});
    std::ifstream in2(dir.path / "seeded" / "circular-law.report");
    const std::string second((std::istreambuf_iterator<char>(in2)), {});
    CHECK(second.find("master_seed=77") != std::string::npos);
    CHECK(first != second);
  }
  SUBCASE("failed assertion exits 1, passing run exits 0") {
    const auto fail = dir.write("d.cfg",
                                "experiment=least-singular\nn_values=10\ntrials=5\nalpha=0.1\n[output]\ndirectory=" +
                                    (dir.path / "o").string() + "\n");
    // At alpha = 0.1 and n = 10 nearly every row is empty: sigma_n = 0.
    CHECK(cli({"run", fail.string()}).code == kExitAssertion);
    const auto pass = dir.write("t.cfg", "experiment=truncation-decay\nn_values=10,100\ndraws=1000\n[output]\n"
                                         "directory=" + (dir.path / "o").string() + "\n");
    CHECK(cli({"run", pass.string()}).code == kExitOk);
  }
  SUBCASE("worker count from the environment") {
    const auto cfg = dir.write("w.cfg", "n_values=10\ntrials=1\n[output]\ndirectory=" + (dir.path / "w").string() + "\n");
    setenv("SPARSECIRC_WORKERS", "zero", 1);
    CHECK(cli({"run", cfg.string()}).code == kExitUsage);
    setenv("SPARSECIRC_WORKERS", "3", 1);
    CHECK(cli({"run", cfg.string()}).code != kExitUsage);
    unsetenv("SPARSECIRC_WORKERS");
  }
  SUBCASE("figure") {
    write_eigenvalues_csv(Esd({Complex(0.1, 0.2)}), dir.path / "one.csv");
    const auto spec = dir.write("f.fig", "source = one.csv\noverlay = true\noutput = one.svg\n");
    const auto r = cli({"figure", spec.string()});
    CHECK(r.code == kExitOk);
    std::ifstream in(dir.path / "one.svg");
    const std::string svg((std::istreambuf_iterator<char>(in)), {});
    CHECK(count(svg, "class=\"marker\"") == 1);
    const auto to_stdout = cli({"figure", spec.string(), "-o", (dir.path / "two.svg").string()});
    CHECK(to_stdout.code == kExitOk);
    CHECK(fs::exists(dir.path / "two.svg"));
    std::ofstream(dir.path / "broken.csv") << "re,im\n1,x\n";
    const auto broken = dir.write("b.fig", "source = broken.csv\n");
    CHECK(cli({"figure", broken.string()}).code == kExitUsage);
  }
  SUBCASE("verify") {
    const auto r = cli({"verify"});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("FAIL") == std::string::npos);
  }
}
