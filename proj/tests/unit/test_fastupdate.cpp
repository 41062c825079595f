#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "vbsbl/fastupdate.hpp"

using namespace vbsbl;

namespace {

BlockLocalData local(std::vector<double> s, std::vector<double> q, double rho = 0.5) {
  return make_local_data(Eigen::Map<Eigen::VectorXd>(s.data(), static_cast<Index>(s.size())),
                         Eigen::Map<Eigen::VectorXd>(q.data(), static_cast<Index>(q.size())), rho);
}

BlockLocalData random_local(std::mt19937_64& rng, Index d) {
  std::vector<double> s, q;
  for (Index l = 0; l < d; ++l) {
    s.push_back(oracle::log_uniform(rng, 0.05, 20.0));
    q.push_back(oracle::log_uniform(rng, 0.01, 30.0));
  }
  return local(s, q, oracle::uniform(rng, 0, 1) < 0.5 ? 0.5 : 1.0);
}

void check_coeffs(const Poly& got, const std::vector<double>& want, double tol = 1e-12) {
  REQUIRE(got.size() >= want.size());
  for (std::size_t k = 0; k < got.size(); ++k) {
    const double w = k < want.size() ? want[k] : 0.0;
    CHECK(got[k] == doctest::Approx(w).epsilon(tol).scale(1.0));
  }
}

std::vector<Hyperprior> polynomial_priors() {
  return {Jeffreys{}, ScaledJeffreys{1.0}, GammaPrior{2.0, 1.0}, InverseGamma{10.0}};
}

}  // namespace

TEST_CASE("A polynomial") {
  check_coeffs(poly_A(local({1}, {0})), {1, 2, 1});
  check_coeffs(poly_A(local({1, 2}, {0, 0})), {1, 6, 13, 12, 4});
  // all-zero eigenvalues are clamped to 1e-12, so A is 1 up to tiny terms
  const Poly a0 = poly_A(local({0, 0}, {1, 1}));
  CHECK(a0[0] == 1.0);
  for (std::size_t k = 1; k < a0.size(); ++k) CHECK(std::abs(a0[k]) < 1e-11);
}

TEST_CASE("B polynomial") {
  check_coeffs(poly_B(local({1}, {2})), {5, 1});
  check_coeffs(poly_B(local({3}, {0.5})), {0.25 + 3, 9});
  check_coeffs(poly_B(local({1, 1}, {1, 1})), {4, 10, 8, 2});
}

TEST_CASE("G for Jeffreys with one dimension") {
  for (auto [s, q] : {std::pair{1.0, 2.0}, std::pair{3.0, 0.5}, std::pair{0.7, 0.1}}) {
    check_coeffs(poly_G(Jeffreys{}, local({s}, {q})), {1.0, s - q * q});
  }
}

TEST_CASE("G equals the textbook combinations of A and B") {
  std::mt19937_64 rng(21);
  for (int rep = 0; rep < 40; ++rep) {
    const auto data = random_local(rng, oracle::uniform_int(rng, 1, 4));
    const double rho = data.rho;
    const double d = static_cast<double>(data.d());
    const Poly A = poly_A(data);
    const Poly xB = poly_shift(poly_B(data), 1);
    const Poly x2B = poly_shift(poly_B(data), 2);
    const Poly xA = poly_shift(A, 1);
    const std::vector<std::pair<Hyperprior, Poly>> cases{
        {Jeffreys{}, poly_axpy(poly_axpy({}, d, A), -1.0, xB)},
        {ScaledJeffreys{1.5}, poly_axpy(poly_axpy({}, 1.5 + rho * d, A), -rho, xB)},
        {GammaPrior{2.0, 1.0}, poly_axpy(poly_axpy(poly_axpy({}, 1.0 + rho * d, A), -rho, xB), -1.0, xA)},
        {InverseGamma{3.0}, poly_axpy(poly_axpy({}, 3.0, A), -2.0 * rho, x2B)},
    };
    for (const auto& [prior, want] : cases) {
      const Poly got = poly_G(prior, data);
      // compare values rather than coefficients: the textbook forms cancel
      for (double g : {0.0, 0.3, 2.0, 17.0}) {
        const double scale = poly_eval(A, g) * (1.0 + d) * (1.0 + g) * (1.0 + g) * 10.0;
        CHECK(std::abs(poly_eval(got, g) - poly_eval(want, g)) <= 1e-9 * scale);
      }
    }
  }
}

TEST_CASE("general GIG has no fixed-point polynomial") {
  CHECK_THROWS_AS(poly_G(GeneralizedInverseGaussian{}, local({1}, {1})), Error);
}

TEST_CASE("h at a few points") {
  const auto data = local({1}, {2});
  CHECK(h_eval(data, 1.0) == doctest::Approx(1.5));
  CHECK(h_eval(data, 0.0) == doctest::Approx(5.0));
  const auto two = local({2, 0.5}, {1, 3});
  CHECK(h_eval(two, 0.0) == doctest::Approx(1 + 2 + 9 + 0.5));
}

TEST_CASE("gamma h tends to the block size") {
  // Each term behaves like 1/gamma, so gamma h(gamma) -> d.
  const auto data = local({2, 0.5, 4}, {1, 3, 0.2});
  const double g = 1e10;
  CHECK(g * h_eval(data, g) == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("h agrees with B / A and is strictly decreasing") {
  std::mt19937_64 rng(4);
  for (int rep = 0; rep < 30; ++rep) {
    const auto data = random_local(rng, oracle::uniform_int(rng, 1, 5));
    const Poly A = poly_A(data);
    const Poly B = poly_B(data);
    for (int k = 0; k < 20; ++k) {
      const double g = oracle::uniform(rng, 0, 100);
      const double h = h_eval(data, g);
      CHECK(std::abs(h - poly_eval(B, g) / poly_eval(A, g)) <= 1e-9 * (1.0 + h));
      CHECK(h_eval(data, g + 1e-3) < h);
      CHECK(h_derivative(data, g) < 0.0);
    }
  }
}

TEST_CASE("f at the documented points") {
  CHECK(f_eval(Jeffreys{}, local({1}, {2}), 0.0) == doctest::Approx(0.2));
  CHECK(f_eval(GammaPrior{2.0, 1.0}, local({1}, {2}, 1.0), 0.0) == doctest::Approx(1.0 / 3.0));
  std::mt19937_64 rng(9);
  for (int rep = 0; rep < 20; ++rep) {
    const auto data = random_local(rng, 3);
    for (const auto& prior : polynomial_priors()) CHECK(f_eval(prior, data, 1.0) > f_eval(prior, data, 0.0));
  }
}

TEST_CASE("f derivative matches central differences") {
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 25; ++rep) {
    const auto data = random_local(rng, oracle::uniform_int(rng, 1, 4));
    const double g = oracle::log_uniform(rng, 1e-2, 1e2);
    for (const auto& prior : polynomial_priors()) {
      const double dlt = 1e-6 * std::max(g, 1.0);
      const double num = (f_eval(prior, data, g + dlt) - f_eval(prior, data, g - dlt)) / (2.0 * dlt);
      const double ana = f_derivative(prior, data, g);
      CHECK(std::abs(ana - std::abs(num)) <= 1e-4 * (1.0 + ana));
    }
  }
}

TEST_CASE("Jeffreys root and its stability") {
  const auto data = local({1}, {2});
  const auto res = theorem1_limit(Jeffreys{}, data, 0.0);
  REQUIRE(res.roots.size() == 1);
  CHECK(res.roots[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(res.stability[0] < 1.0);
  CHECK(res.limit == doctest::Approx(1.0 / 3.0));
  CHECK(res.branch == LimitBranch::SmallestAbove);
  const auto it = oracle::iterate([&](double g) { return f_eval(Jeffreys{}, data, g); }, 0.0, 10000, 10000);
  CHECK(it.limit == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("Jeffreys stability approaches one at the boundary q^2 = s") {
  double last = 0.0;
  for (double q2 : {1.5, 1.1, 1.01, 1.001}) {
    const auto res = theorem1_limit(Jeffreys{}, local({1}, {std::sqrt(q2)}), 0.0);
    REQUIRE(res.roots.size() == 1);
    CHECK(res.stability[0] < 1.0);
    CHECK(res.stability[0] > last);
    last = res.stability[0];
  }
  CHECK(last > 0.99);
}

TEST_CASE("weak block diverges") {
  const auto data = local({1}, {0.5});
  check_coeffs(poly_G(Jeffreys{}, data), {1.0, 0.75});
  const auto res = theorem1_limit(Jeffreys{}, data, 0.0);
  CHECK(res.roots.empty());
  CHECK(res.branch == LimitBranch::Diverges);
  CHECK(std::isinf(res.limit));
  const auto it = oracle::iterate([&](double g) { return f_eval(Jeffreys{}, data, g); }, 0.0, 10000, 10000, 1e-13, 1e8);
  CHECK(std::isinf(it.limit));
}

TEST_CASE("starting at a fixed point stays there") {
  std::mt19937_64 rng(31);
  for (const auto& prior : polynomial_priors()) {
    const auto data = random_local(rng, 2);
    const auto res = theorem1_limit(prior, data, 0.0);
    for (std::size_t k = 0; k < res.roots.size(); ++k) {
      if (!res.retained[k]) continue;
      const auto again = theorem1_limit(prior, data, res.roots[k]);
      CHECK(again.limit == res.roots[k]);
      CHECK(again.branch == LimitBranch::StartIsFixedPoint);
    }
  }
}

TEST_CASE("from infinity the largest retained root is taken") {
  const auto res = theorem1_limit(Jeffreys{}, local({1}, {2}), kInf);
  CHECK(res.branch == LimitBranch::FromInfinity);
  CHECK(res.limit == doctest::Approx(1.0 / 3.0));
  CHECK(std::isinf(theorem1_limit(Jeffreys{}, local({1}, {0.5}), kInf).limit));
}

TEST_CASE("invalid limit arguments") {
  const auto data = local({1}, {2});
  CHECK_THROWS_AS(theorem1_limit(Jeffreys{}, data, -1.0), Error);
  CHECK_THROWS_AS(theorem1_limit(Jeffreys{}, data, 0.0, 0.0), Error);
  CHECK_THROWS_AS(theorem1_limit(Jeffreys{}, data, 0.0, 1.5), Error);
}

TEST_CASE("leading coefficient signs") {
  std::mt19937_64 rng(8);
  for (int rep = 0; rep < 50; ++rep) {
    const Index d = oracle::uniform_int(rng, 1, 4);
    const auto data = random_local(rng, d);
    double prod = 1.0;
    for (Index l = 0; l < d; ++l) prod *= data.s[l] * data.s[l];
    const auto lead = [&](const Hyperprior& p) {
      const Poly g = poly_G(p, data);
      return std::pair{g.size() - 1, g.back()};
    };
    CHECK(lead(InverseGamma{2.0}).second < 0.0);
    CHECK(lead(GammaPrior{1.0, 1.0}).second < 0.0);
    const auto [deg_sj, lead_sj] = lead(ScaledJeffreys{0.7});
    CHECK(deg_sj == static_cast<std::size_t>(2 * d));
    CHECK(lead_sj == doctest::Approx(0.7 * prod).epsilon(1e-10));
    CHECK(lead(ScaledJeffreys{-0.2}).second < 0.0);
    const Poly gj = poly_G(Jeffreys{}, data);
    CHECK(gj.size() <= static_cast<std::size_t>(2 * d));
    CHECK(gj[0] > 0.0);
  }
}

TEST_CASE("sigma_bar with a single identity block is the identity") {
  InstanceData<Real> data;
  data.y = Vec<Real>::Ones(3);
  data.dictionary = Mat<Real>::Identity(3, 3);
  data.block_sizes = {3};
  const auto inst = validate_instance(data);
  const auto sb = sigma_bar(std::vector<double>{kInf}, 1.0, inst, 0);
  CHECK(sb.matrix.isApprox(Mat<Real>::Identity(3, 3)));
}

TEST_CASE("local data of the noiseless identity setup") {
  const double alpha = 1.7;
  InstanceData<Real> data;
  data.y = Vec<Real>::Constant(4, alpha);
  data.dictionary = Mat<Real>::Identity(4, 4);
  data.block_sizes = {4};
  const auto inst = validate_instance(data);
  const auto ld = block_local_data(sigma_bar(std::vector<double>{kInf}, 1.0, inst, 0), inst, 1.0);
  for (Index l = 0; l < 4; ++l) CHECK(ld.s[l] == doctest::Approx(1.0));
  CHECK(ld.q.squaredNorm() == doctest::Approx(4 * alpha * alpha));
}

TEST_CASE("local data with a diagonal Sigma_bar") {
  InstanceData<Real> data;
  data.y = Vec<Real>::Ones(2);
  data.dictionary = Mat<Real>::Zero(2, 2);
  data.dictionary.diagonal() << std::sqrt(0.5), std::sqrt(1.0 / 3.0);
  data.block_sizes = {2};
  const auto inst = validate_instance(data);
  const auto ld = block_local_data(sigma_bar(std::vector<double>{kInf}, 1.0, inst, 0), inst, 1.0);
  CHECK(ld.s[0] == doctest::Approx(2.0));
  CHECK(ld.s[1] == doctest::Approx(3.0));
}

TEST_CASE("sigma_bar matches a dense inverse with large pruned gammas") {
  std::mt19937_64 rng(12);
  for (int rep = 0; rep < 10; ++rep) {
    InstanceData<Real> data;
    data.dictionary = oracle::random_matrix<Real>(8, 8, rng);
    data.y = oracle::random_matrix<Real>(8, 1, rng).col(0);
    data.block_sizes = {2, 2, 2, 2};
    const auto inst = validate_instance(data);
    std::vector<double> gamma{0.5, kInf, 2.0, kInf};
    const double lambda = 1.3;
    const Index i = 1;
    const auto sb = sigma_bar(gamma, lambda, inst, i);
    Mat<Real> full = lambda * data.dictionary.transpose() * data.dictionary;
    for (Index k = 0; k < 4; ++k) {
      if (k == i) continue;
      const double g = std::isinf(gamma[static_cast<std::size_t>(k)]) ? 1e12 : gamma[static_cast<std::size_t>(k)];
      full.block(2 * k, 2 * k, 2, 2) += g * Mat<Real>::Identity(2, 2);
    }
    const Mat<Real> dense = full.inverse();
    const std::vector<Index> cols = oracle::columns_of(inst, sb.blocks);
    for (std::size_t r = 0; r < cols.size(); ++r)
      for (std::size_t c = 0; c < cols.size(); ++c)
        CHECK(std::abs(sb.matrix(static_cast<Index>(r), static_cast<Index>(c)) - dense(cols[r], cols[c])) <= 1e-6);
  }
}

TEST_CASE("h equals the Gaussian expectation under a full update") {
  std::mt19937_64 rng(41);
  int checked = 0;
  for (int rep = 0; rep < 40; ++rep) {
    const auto inst = oracle::random_instance<Complex>(rng);
    auto gamma = oracle::random_gamma(rng, inst.block_count());
    const double lambda = oracle::log_uniform(rng, 0.5, 50.0);
    const Index i = oracle::uniform_int(rng, 0, inst.block_count() - 1);
    const double g = oracle::log_uniform(rng, 0.05, 20.0);
    gamma[static_cast<std::size_t>(i)] = g;
    const auto ld = block_local_data(sigma_bar(gamma, lambda, inst, i), inst, lambda);
    const auto post = oracle::dense_posterior(inst, gamma, lambda);
    const double want = oracle::block_energy(inst, post, i);
    CHECK(h_eval(ld, g) == doctest::Approx(want).epsilon(1e-7));
    // trace part alone
    const Index off = oracle::dense_offset(inst, post, i);
    const Index d = inst.blocks().size(i);
    const double tr = std::real((inst.precision(i) * post.sigma.block(off, off, d, d)).trace());
    double tr_local = 0.0;
    for (Index l = 0; l < d; ++l) tr_local += ld.s[l] / (1.0 + g * ld.s[l]);
    CHECK(tr_local == doctest::Approx(tr).epsilon(1e-8));
    ++checked;
  }
  CHECK(checked == 40);
}

TEST_CASE("Schur-complement path agrees with sigma_bar") {
  std::mt19937_64 rng(77);
  for (int rep = 0; rep < 20; ++rep) {
    const auto inst = oracle::random_instance<Complex>(rng);
    const auto gamma = oracle::random_gamma(rng, inst.block_count());
    const double lambda = oracle::log_uniform(rng, 0.5, 50.0);
    const Index i = oracle::uniform_int(rng, 0, inst.block_count() - 1);
    const auto sb = sigma_bar(gamma, lambda, inst, i);
    const auto direct = block_local_data(sb, inst, lambda);
    const Index d = inst.blocks().size(i);

    const auto cond = oracle::block_conditional(inst, gamma, lambda, i);
    // r is such that Sigma_bar_i r equals block i of Sigma_bar Phi^H y
    const auto via = local_data_from_complement(cond.P, Vec<Complex>(cond.r / lambda), inst.precision_factor(i),
                                                lambda, inst.rho());
    std::vector<double> a(via.s.begin(), via.s.end()), b(direct.s.begin(), direct.s.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    for (Index l = 0; l < d; ++l) CHECK(a[static_cast<std::size_t>(l)] == doctest::Approx(b[static_cast<std::size_t>(l)]).epsilon(1e-7));
    for (double g : {0.0, 0.5, 5.0}) CHECK(h_eval(via, g) == doctest::Approx(h_eval(direct, g)).epsilon(1e-7));
  }
}

TEST_CASE("singular complement leaves the finite directions untouched") {
  // C = diag(0, 10, 20): the null direction has s -> inf, the others 1/10 and 1/20
  Mat<Real> C = Eigen::Vector3d(0.0, 10.0, 20.0).asDiagonal();
  const Vec<Real> r = Eigen::Vector3d(1.0, 2.0, 3.0);
  const Mat<Real> L = Mat<Real>::Identity(3, 3);
  const auto data = local_data_from_complement(C, r, L, 1.0, 0.5);
  std::vector<double> s(data.s.begin(), data.s.end());
  std::sort(s.begin(), s.end());
  CHECK(s[0] == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(s[1] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(s[2] > 1e10);
  // h(1): the null direction contributes 1/gamma + |r_0|^2 / gamma^2
  const double want = 2.0 + 0.04 / 1.21 + 0.1 / 1.1 + 0.0225 / 1.1025 + 0.05 / 1.05;
  CHECK(h_eval(data, 1.0) == doctest::Approx(want).epsilon(1e-9));
}

TEST_CASE("Jeffreys roots are stationary points of the marginal likelihood") {
  std::mt19937_64 rng(55);
  for (int rep = 0; rep < 50; ++rep) {
    const auto data = random_local(rng, oracle::uniform_int(rng, 1, 4));
    const auto res = theorem1_limit(Jeffreys{}, data, 0.0);
    for (double g : res.roots) {
      double L = 0.0, dL = 0.0;
      for (Index l = 0; l < data.d(); ++l) {
        const double s = data.s[l];
        const double q2 = data.q_abs2(l);
        const double t = 1.0 + g * s;
        L += std::log(g * s / t) - g * q2 / t;
        dL += 1.0 / (g * t) - q2 / (t * t);
      }
      CHECK(std::abs(dL) <= 1e-6 * (1.0 + std::abs(L)));
    }
  }
}
