#include <doctest.h>

#include "oracles.hpp"
#include "vbsbl/inference.hpp"
#include "vbsbl/model.hpp"

using namespace vbsbl;

namespace {

template <class Scalar>
InstanceData<Scalar> identity_data(Index n, std::vector<Index> sizes) {
  InstanceData<Scalar> d;
  d.y = Vec<Scalar>::Ones(n);
  d.dictionary = Mat<Scalar>::Identity(n, n);
  d.block_sizes = std::move(sizes);
  return d;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("block structure offsets and dimensions") {
  const std::vector<Index> sizes{2, 3, 1};
  const BlockStructure b(sizes);
  CHECK(b.count() == 3);
  CHECK(b.dim() == 6);
  CHECK(b.offset(0) == 0);
  CHECK(b.offset(1) == 2);
  CHECK(b.offset(2) == 5);
  const std::vector<Index> some{0, 2};
  CHECK(b.dim_of(some) == 3);
  CHECK(BlockStructure::uniform(4, 5).dim() == 20);
}

TEST_CASE("identity instance with unit precisions is valid") {
  const auto inst = validate_instance(identity_data<Real>(4, {2, 2}));
  CHECK(inst.block_count() == 2);
  CHECK(inst.rho() == 0.5);
  for (Index i = 0; i < 2; ++i) {
    CHECK(inst.precision_factor(i).isApprox(Mat<Real>::Identity(2, 2)));
    CHECK(inst.precision_logdet(i) == doctest::Approx(0.0));
  }
  const auto cinst = validate_instance(identity_data<Complex>(4, {2, 2}));
  CHECK(cinst.rho() == 1.0);
}

TEST_CASE("indefinite block precision is rejected") {
  auto data = identity_data<Real>(4, {2, 2});
  Mat<Real> bad(2, 2);
  bad << 1, 2, 2, 1;
  data.precisions = {bad, Mat<Real>::Identity(2, 2)};
  CHECK(code_of([&] { validate_instance(data); }) == ErrorCode::NonPositiveDefiniteBlockPrecision);
}

TEST_CASE("block sizes must add up to the dictionary width") {
  InstanceData<Real> data;
  data.y = Vec<Real>::Ones(5);
  data.dictionary = Mat<Real>::Identity(5, 5);
  data.block_sizes = {3, 3};
  CHECK(code_of([&] { validate_instance(data); }) == ErrorCode::DimensionMismatch);

  auto rows = identity_data<Real>(4, {2, 2});
  rows.y = Vec<Real>::Ones(3);
  CHECK(code_of([&] { validate_instance(rows); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("Cholesky factors reproduce the block precisions") {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 20; ++rep) {
    const auto inst = oracle::random_instance<Complex>(rng);
    for (Index i = 0; i < inst.block_count(); ++i) {
      const Mat<Complex>& L = inst.precision_factor(i);
      const Mat<Complex>& B = inst.precision(i);
      const double scale = B.cwiseAbs().maxCoeff();
      CHECK((L * L.adjoint() - B).cwiseAbs().maxCoeff() <= 1e-10 * scale);
      CHECK(inst.precision_logdet(i) == doctest::Approx(std::log(std::real(B.determinant()))).epsilon(1e-10));
    }
  }
}

TEST_CASE("diagonal precision gives a diagonal square-root factor") {
  auto data = identity_data<Real>(3, {3});
  data.precisions = {Vec<Real>(Vec<Real>::LinSpaced(3, 1.0, 9.0)).asDiagonal()};
  const auto inst = validate_instance(data);
  const Mat<Real> expected = Vec<Real>(Vec<Real>::LinSpaced(3, 1.0, 9.0).cwiseSqrt()).asDiagonal();
  CHECK(inst.precision_factor(0).isApprox(expected, 1e-14));
}

TEST_CASE("mmv_to_block with one snapshot keeps the dictionary") {
  std::mt19937_64 rng(3);
  const Mat<Complex> psi = oracle::random_matrix<Complex>(4, 6, rng);
  const Mat<Complex> Y = oracle::random_matrix<Complex>(4, 1, rng);
  const auto inst = mmv_to_block(Y, psi, Mat<Complex>(Mat<Complex>::Identity(1, 1)));
  CHECK(inst.dictionary().isApprox(psi));
  CHECK(inst.block_count() == 6);
  CHECK(inst.blocks().size(3) == 1);
  CHECK(inst.y().isApprox(Y.col(0)));
}

TEST_CASE("mmv_to_block vectorizes rows of Y") {
  Mat<Real> Y(2, 2);
  Y << 1, 2, 3, 4;
  const auto inst = mmv_to_block(Y, Mat<Real>(Mat<Real>::Identity(2, 2)), Mat<Real>(Mat<Real>::Identity(2, 2)));
  CHECK(inst.y() == (Vec<Real>(4) << 1, 2, 3, 4).finished());
  CHECK(inst.dictionary() == Mat<Real>::Identity(4, 4));
  CHECK(inst.block_count() == 2);
}

TEST_CASE("mmv round trip recovers a row-sparse solution") {
  std::mt19937_64 rng(11);
  const Mat<Real> psi = oracle::random_matrix<Real>(3, 5, rng);
  Mat<Real> X = Mat<Real>::Zero(5, 4);
  X.row(2) << 3, -2, 4, 1;
  X.row(4) << -3, 2, 2, -4;
  const Mat<Real> Y = psi * X;
  const auto inst = mmv_to_block(Y, psi, Mat<Real>(Mat<Real>::Identity(4, 4)));
  SolverConfig config;
  config.fixed_noise_precision = 1e6;
  const auto state = fast_solve(inst, Jeffreys{}, config);
  CHECK(state.active_blocks == std::vector<Index>{2, 4});
  const Mat<Real> rows = block_vector_to_rows(state.x_hat, 5, 4);
  for (Index r : {0, 1, 3}) CHECK(rows.row(r).isZero(0.0));
  CHECK(rows.row(2).norm() > 0.0);
  CHECK(rows.row(4).norm() > 0.0);
}
