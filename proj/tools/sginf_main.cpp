#include <iostream>

#include <CLI11.hpp>

#include "sginf/commands.hpp"

namespace {

void common_flags(CLI::App* sub, sginf::cli::CommandOptions& o) {
  sub->add_option("--output,-o", o.output, "Report path (default: stdout)");
  sub->add_option("--jobs", o.jobs, "OpenMP threads (0: runtime default)")->check(CLI::NonNegativeNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Long-time behaviour of finite-dimensional operator semigroups"};
  app.require_subcommand(1);
  sginf::cli::CommandOptions o;

  auto* am = app.add_subcommand("analyze-matrix", "Powers T^n of a matrix");
  auto* ag = app.add_subcommand("analyze-generator", "Semigroup e^{tA} of a generator");
  for (auto* sub : {am, ag}) {
    sub->add_option("--input,-i", o.input, "Matrix (JSON or CSV) or semigroup JSON")->required();
    sub->add_option("--monoid", o.monoid, "Index monoid, e.g. naturals, nonneg_reals, dyadics");
    sub->add_option("--norm", o.norm, "Norm exponent: 1, 2 or inf");
    sub->add_option("--tol", o.tol, "Unit-circle tolerance");
    sub->add_option("--k-max", o.k_max, "Largest root-of-unity order scanned");
    common_flags(sub, o);
  }

  auto* ap = app.add_subcommand("abel-probe", "Classify lambda via the Abel resolvent limit");
  ap->add_option("--input,-i", o.input, "Matrix (JSON or CSV)")->required();
  ap->add_option("--lambda", o.lambda, "Unimodular point as re or re,im");
  ap->add_option("--tol", o.tol, "Resolvent-point threshold eps0");
  common_flags(ap, o);

  auto* pd = app.add_subcommand("pde-demo", "Discretized parabolic system, convergence series");
  pd->add_option("--input,-i", o.input, "Scenario JSON")->required();
  pd->add_option("--t-max", o.t_max, "Final probe time");
  pd->add_option("--csv", o.csv, "CSV series path (default: next to --output)");
  common_flags(pd, o);

  auto* en = app.add_subcommand("ensemble", "Seeded random families and their predicate suites");
  en->add_option("--kind", o.kind, "positive | monomial_unimodular | p_contractive | primitive")->required();
  en->add_option("--count", o.count, "Number of members");
  en->add_option("--seed", o.seed, "Base seed");
  common_flags(en, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return sginf::cli::kInputError;
  }
  o.verb = app.get_subcommands().front()->get_name();
  return sginf::cli::run(o, std::cout, std::cerr);
}
