#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nvcr/errors.hpp"
#include "nvcr/spin_model.hpp"
#include "oracles.hpp"

using namespace nvcr;
using doctest::Approx;

namespace {

FieldConfiguration field(const Vector3& b, double e_perp = 0.0, double phi = 0.0) {
  FieldConfiguration f;
  f.b_gauss = b;
  f.e_perp_mhz = e_perp;
  f.phi_e = phi;
  return f;
}

}  // namespace

TEST_CASE("class axes are unit <111> vectors with pairwise cosines of -1/3") {
  const auto& axes = class_axes();
  for (size_t i = 0; i < 4; ++i) {
    CHECK(axes[i].norm() == Approx(1.0).epsilon(1e-15));
    for (size_t j = i + 1; j < 4; ++j) CHECK(axes[i].dot(axes[j]) == Approx(-1.0 / 3).epsilon(1e-14));
  }
}

TEST_CASE("canonical and oriented frames are right-handed") {
  oracle::Rng rng(11);
  for (int k = 0; k < 4; ++k) {
    CHECK_NOTHROW(NVClassFrame::canonical(k).validate());
    for (int i = 0; i < 10; ++i) {
      const Vector3 b = rng.unit_vector();
      const NVClassFrame f = NVClassFrame::oriented(k, b);
      CHECK_NOTHROW(f.validate());
      CHECK(b.dot(f.axes.z_hat) >= -1e-12);
      CHECK(std::abs(b.dot(f.axes.y_hat)) < 1e-12);
    }
  }
  CHECK_THROWS_AS(NVClassFrame::canonical(4), InvalidArgument);
}

TEST_CASE("malformed frames are rejected") {
  Frame f;
  f.x_hat = Vector3(1, 1, 0);
  CHECK_THROWS_AS(f.validate(), InvalidFrame);
  Frame left{Vector3::UnitY(), Vector3::UnitX(), Vector3::UnitZ()};
  CHECK_THROWS_AS(left.validate(), InvalidFrame);
  Frame nan;
  nan.z_hat = Vector3(0, 0, std::nan(""));
  CHECK_THROWS_AS(nan.validate(), InvalidFrame);
}

TEST_CASE("zero field: |0> at 0 and the doublet at D") {
  const auto es = solve(NVClassFrame::canonical(0), field(Vector3::Zero()));
  CHECK(es.energies_ghz[0] == Approx(0.0).epsilon(1e-12));
  CHECK(es.energies_ghz[1] == Approx(2.87).epsilon(1e-12));
  CHECK(es.energies_ghz[2] == Approx(2.87).epsilon(1e-12));
  // Degenerate doublet resolved onto |-> and |+>.
  CHECK(es.overlaps.g_zero == Approx(1.0));
  CHECK(es.overlaps.d_minus == Approx(1.0));
  CHECK(es.overlaps.e_plus == Approx(1.0));
}

TEST_CASE("strain alone splits the doublet into |+> above |-> by 2 E_perp") {
  for (double phi : {0.0, 0.7, 2.5}) {
    const auto es = solve(NVClassFrame::canonical(2), field(Vector3::Zero(), 4.0, phi));
    CHECK((es.energies_ghz[2] - es.energies_ghz[1]) * 1e3 == Approx(8.0).epsilon(1e-9));
    CHECK(es.energies_ghz[2] == Approx(2.874).epsilon(1e-12));
    CHECK(es.overlaps.e_plus == Approx(1.0).epsilon(1e-12));
    CHECK(es.overlaps.d_minus == Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("axial field makes |e> the |+1> state") {
  const auto cls = NVClassFrame::canonical(1);
  const auto es = solve(cls, field(100.0 * cls.axes.z_hat, 4.0));
  CHECK(es.overlaps.e_plus_one > 0.999);
  CHECK(es.overlaps.e_plus < 0.51);
}

TEST_CASE("Hamiltonian: trace 2(D + E_par), Hermitian, eigenvalues match the cubic formula") {
  oracle::Rng rng(2024);
  PhysicalConstants c;
  for (int i = 0; i < 50; ++i) {
    const int k = static_cast<int>(rng.uniform(0, 4));
    FieldConfiguration f = field(rng.unit_vector() * rng.uniform(0, 300), rng.uniform(0, 10),
                                 rng.uniform(0, 6.3));
    f.e_par_mhz = rng.uniform(-1, 1);
    const Matrix3c h = build_hamiltonian(NVClassFrame::canonical(k), f, c);
    CHECK(h.trace().real() == Approx(2 * (c.zfs_ghz + f.e_par_mhz * 1e-3)).epsilon(1e-13));
    CHECK(std::abs(h.trace().imag()) < 1e-15);
    CHECK((h - h.adjoint()).norm() < 1e-15);
    const auto es = diagonalize(h, f.phi_e);
    const auto ref = oracle::hermitian3_eigenvalues(h);
    for (size_t n = 0; n < 3; ++n) CHECK(es.energies_ghz[n] == Approx(ref[n]).epsilon(1e-10));
    CHECK(es.max_residual < 1e-12);
    CHECK((es.states.adjoint() * es.states - Matrix3c::Identity()).norm() < 1e-12);
  }
}

TEST_CASE("diagonalize rejects non-Hermitian and non-finite input") {
  Matrix3c h = Matrix3c::Identity();
  h(0, 1) = Complex(1, 0);
  CHECK_THROWS_AS(diagonalize(h), NonHermitian);
  h = Matrix3c::Identity();
  h(2, 2) = std::nan("");
  CHECK_THROWS_AS(diagonalize(h), NonHermitian);
}

TEST_CASE("invalid inputs throw") {
  FieldConfiguration f;
  f.e_perp_mhz = -1;
  CHECK_THROWS_AS(build_hamiltonian(NVClassFrame::canonical(0), f), InvalidArgument);
  PhysicalConstants c;
  c.zfs_ghz = 0;
  CHECK_THROWS_AS(build_hamiltonian(NVClassFrame::canonical(0), FieldConfiguration{}, c), InvalidArgument);
}

TEST_CASE("transverse scan: 8 MHz at zero field, 65-75 MHz at 150 G") {
  const double bs[] = {0.0, 150.0};
  const auto pts = transverse_field_scan(NVClassFrame::canonical(0), bs, 4.0);
  CHECK(std::abs(pts[0].splitting_mhz - 8.0) < 1e-6);
  CHECK(pts[1].splitting_mhz > 65.0);
  CHECK(pts[1].splitting_mhz < 75.0);
  // Independent 3x3 diagonalization gives 0.979921 at exactly 150 G.
  CHECK(pts[1].matching == Approx(0.9799214).epsilon(1e-6));
}

TEST_CASE("matching factor stays above 0.98 below about 149.7 G") {
  std::vector<double> bs;
  for (int i = 0; i <= 149; ++i) bs.push_back(i);
  for (const auto& p : transverse_field_scan(NVClassFrame::canonical(0), bs, 4.0)) CHECK(p.matching > 0.98);
  const double above[] = {149.8};
  CHECK(transverse_field_scan(NVClassFrame::canonical(0), above, 4.0)[0].matching < 0.98);
}

TEST_CASE("transverse scan splitting matches the cubic-formula oracle") {
  const auto cls = NVClassFrame::canonical(3);
  std::vector<double> bs;
  for (int i = 0; i <= 20; ++i) bs.push_back(10.0 * i);
  const auto pts = transverse_field_scan(cls, bs, 4.0);
  for (const auto& p : pts) {
    const auto h = build_hamiltonian(cls, field(p.b_perp_gauss * cls.axes.x_hat, 4.0));
    const auto e = oracle::hermitian3_eigenvalues(h);
    CHECK(p.splitting_mhz == Approx((e[2] - e[1]) * 1e3).epsilon(1e-8));
  }
  // Splitting grows with the transverse field and the matching stays high.
  for (size_t i = 1; i < pts.size(); ++i) CHECK(pts[i].splitting_mhz > pts[i - 1].splitting_mhz);
}

TEST_CASE("transverse scan is independent of the in-plane direction") {
  const auto cls = NVClassFrame::canonical(0);
  const double bs[] = {0.0, 50.0, 150.0};
  const auto a = transverse_field_scan(cls, bs, 4.0);
  const auto b = transverse_field_scan(cls, cls.axes.y_hat, bs, 4.0);
  for (size_t i = 0; i < 3; ++i) {
    CHECK(a[i].splitting_mhz == Approx(b[i].splitting_mhz).epsilon(1e-10));
    CHECK(a[i].matching == Approx(b[i].matching).epsilon(1e-10));
  }
  CHECK_THROWS_AS(transverse_field_scan(cls, cls.axes.z_hat, bs, 4.0), InvalidArgument);
}

TEST_CASE("eigenstate map: |e> follows |+> at small field and |+1> along the axis") {
  const double bs[] = {0.0, 200.0};
  const double thetas[] = {0.0, std::numbers::pi / 2};
  const auto cells = eigenstate_map(NVClassFrame::canonical(0), bs, thetas, 4.0);
  REQUIRE(cells.size() == 4);
  CHECK(cells[0].overlaps.e_plus == Approx(1.0));
  CHECK(cells[2].overlaps.e_plus_one > 0.99);  // 200 G along z
  CHECK(cells[3].overlaps.e_plus > 0.9);       // 200 G transverse
  const double empty[] = {0.0};
  CHECK_THROWS_AS(eigenstate_map(NVClassFrame::canonical(0), std::span<const double>{}, empty, 4.0),
                  InvalidArgument);
}

TEST_CASE("electric energy conversion") {
  CHECK(electric_energy_mhz(1e5, 17.0) == Approx(1.7));
}
