#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "dgmm/error.hpp"
#include "dgmm/io.hpp"
#include "dgmm/sweep.hpp"
#include "dgmm/verify.hpp"

using namespace dgmm;
namespace fs = std::filesystem;

namespace {

const WellPair kE2({0.0, 1.0});

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("dgmm_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("potential descriptors") {
  CHECK(PotentialSpec::from_name("w0").kind == "w0");
  const PotentialSpec s = PotentialSpec::from_name("scaled-1.21");
  CHECK(s.kind == "scaled");
  CHECK(s.factor == 1.21);
  const PotentialSpec p = PotentialSpec::from_name("perturbed-0.2-7");
  CHECK(p.sigma == 0.2);
  CHECK(p.seed == 7);
  const PotentialSpec back = PotentialSpec::from_json(p.to_json());
  CHECK(back.kind == p.kind);
  CHECK(back.sigma == p.sigma);
  CHECK(back.seed == p.seed);
  CHECK_THROWS_AS(PotentialSpec::from_name("quartic"), Error);
  CHECK_THROWS_AS(PotentialSpec::from_json(json{{"kind", "w0"}, {"a", {1}}}), Error);
}

TEST_CASE("number formatting round-trips") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23})
    CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("curve CSV round-trip") {
  const Curve c = Curve::segment(-kE2.A(), kE2.A(), 17);
  const Curve d = curve_from_csv(curve_to_csv(c));
  REQUIRE(d.size() == c.size());
  for (std::size_t k = 0; k < c.size(); ++k) {
    CHECK(d.s[k] == c.s[k]);
    CHECK((d.m[k] - c.m[k]).norm() == 0.0);
  }
  CHECK_THROWS_AS(curve_from_csv("s,M11\n0,x\n"), Error);
}

TEST_CASE("field dump round-trip in both formats") {
  const fs::path dir = scratch("field");
  const GridSpec g = GridSpec::make(9, 7, -0.5, 0.5, -0.5, 0.5, true);
  const Field2D u = layer_field(g, kE2, 0.1, 0.3);
  for (FieldFormat f : {FieldFormat::Csv, FieldFormat::Binary}) {
    write_field(dir / "u", u, {{"eps", 0.1}}, f);
    json meta;
    const Field2D v = read_field(dir / "u.json", &meta);
    CHECK(meta.at("eps") == 0.1);
    CHECK(v.grid.n1 == g.n1);
    CHECK(v.grid.periodic_x1);
    CHECK(v.u1 == u.u1);
    CHECK(v.u2 == u.u2);
  }
  CHECK_THROWS_AS(read_field(dir / "missing.json"), Error);
  fs::remove_all(dir);
}

TEST_CASE("numerical verdict") {
  CHECK(numerical_verdict(2.0, 2.0, 0.01) == Verdict::Pass);
  CHECK(numerical_verdict(6.5, 2.0, 0.01) == Verdict::Fail);
  CHECK(numerical_verdict(6.0, 2.0, 0.01) == Verdict::Indeterminate);
  // Lowering K never turns a pass into a fail.
  for (double K = 8.0; K > 0.0; K -= 0.01) {
    const Verdict v = numerical_verdict(K, 2.0, 0.05);
    const Verdict lower = numerical_verdict(K - 0.01, 2.0, 0.05);
    if (v == Verdict::Pass) CHECK(lower == Verdict::Pass);
    if (v == Verdict::Indeterminate) CHECK(lower != Verdict::Fail);
  }
  CHECK(exit_code(Verdict::Pass) == 0);
  CHECK(exit_code(Verdict::Indeterminate) == 2);
  CHECK(exit_code(Verdict::Fail) == 3);
}

TEST_CASE("perturbation certificate") {
  const CertificateReport c0 = certify_perturbation_class(make_w0(kE2));
  CHECK(c0.sigma == 0.0);
  CHECK(c0.certified);
  const CertificateReport c1 = certify_perturbation_class(make_scaled(kE2, 1.21));
  CHECK(c1.sigma == doctest::Approx(0.1).epsilon(1e-9));
  CHECK(c1.chain_factor == doctest::Approx(1.1 / 0.9));
  CHECK(c1.certified);
  const CertificateReport c2 = certify_perturbation_class(make_scaled(kE2, 2.25));
  CHECK(c2.chain_factor == doctest::Approx(3.0));
  CHECK_FALSE(c2.certified);
  const CertificateReport c4 = certify_perturbation_class(make_scaled(kE2, 4.0));
  CHECK(c4.sigma == doctest::Approx(1.0));
  CHECK_FALSE(c4.certified);
}

TEST_CASE("verify reports") {
  VerifyOptions o;
  o.grid = {32, 32};
  const VerifyReport r = verify_hypothesis(make_w0(kE2), PotentialSpec{}.to_json(), o);
  CHECK(r.verdict == Verdict::Pass);
  CHECK(r.margin == doctest::Approx(4.0).epsilon(0.025));
  CHECK(r.numerical == Verdict::Pass);
  const json j = r.to_json();
  CHECK(j.at("d").at("interval_lower_bound").is_null());
  for (const char* k : {"K_cell", "K_profile", "K_upper", "margin"}) CHECK(j.at(k).contains("source"));

  const VerifyReport s = verify_hypothesis(make_scaled(kE2, 1.21), {}, o);
  CHECK(s.margin / r.margin == doctest::Approx(1.1).epsilon(0.01));

  // Not certified analytically: the numerical route decides.
  const VerifyReport big = verify_hypothesis(make_scaled(kE2, 4.0), {}, o);
  CHECK(big.route == "numerical");
  CHECK(big.verdict == Verdict::Pass);
}
