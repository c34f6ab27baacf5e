#include <doctest.h>

#include <cmath>
#include <sstream>

#include "lpc/datasets.hpp"
#include "lpc/lpc_core.hpp"
#include "lpc/multiclass.hpp"

using namespace lpc;

namespace {

MultiGmmSpec three_class_spec(Eigen::Index p, Eigen::Index n, std::uint64_t seed) {
  MultiGmmSpec s;
  s.k = 3;
  s.p = p;
  s.n = n;
  s.means = Eigen::MatrixXd::Zero(p, 3);
  s.means(0, 0) = -2.0;
  s.means(0, 2) = 2.0;
  s.pi = Eigen::Vector3d(0.3, 0.3, 0.4);
  s.eps.setZero(3, 3);
  s.eps(0, 1) = 0.3;
  s.eps(1, 2) = 0.4;
  s.eps(2, 0) = 0.5;
  s.seed = seed;
  return s;
}

} // namespace

TEST_CASE("multi-class generator") {
  SUBCASE("k = 2 matches the binary generator") {
    const auto bin = generate_noisy_gmm(GmmSpec::isotropic(5, 40, 0.4, 1.5, 0.2, 0.3, 9));
    MultiGmmSpec s;
    s.k = 2;
    s.p = 5;
    s.n = 40;
    s.means = Eigen::MatrixXd::Zero(5, 2);
    s.means(0, 0) = -1.5;
    s.means(0, 1) = 1.5;
    s.pi = Eigen::Vector2d(0.4, 0.6);
    s.eps.setZero(2, 2);
    s.eps(0, 1) = 0.2; // observed 1 | true 2, i.e. eps_plus
    s.eps(1, 0) = 0.3;
    s.seed = 9;
    const auto multi = generate_multi_gmm(s);
    CHECK(multi.X == bin.X);
    const Eigen::VectorXd y_clean = (2 * multi.y_clean.array() - 3).cast<double>();
    const Eigen::VectorXd y_noisy = (2 * multi.y_noisy.array() - 3).cast<double>();
    CHECK(y_clean == *bin.y_clean);
    CHECK(y_noisy == bin.y_noisy);
  }
  SUBCASE("no flip mass leaves labels untouched") {
    auto s = three_class_spec(4, 200, 3);
    s.eps.setZero();
    const auto ds = generate_multi_gmm(s);
    CHECK(ds.y_noisy == ds.y_clean);
  }
  SUBCASE("flip fractions follow the eps columns") {
    const auto s = three_class_spec(2, 2000, 17);
    const auto ds = generate_multi_gmm(s);
    const auto counts = s.class_counts();
    CHECK(counts == std::vector<Eigen::Index>{600, 600, 800});
    Eigen::MatrixXd observed = Eigen::MatrixXd::Zero(3, 3);
    for (Eigen::Index i = 0; i < ds.y_clean.size(); ++i) observed(ds.y_noisy[i] - 1, ds.y_clean[i] - 1) += 1.0;
    for (int b = 0; b < 3; ++b) {
      const double nb = static_cast<double>(counts[b]);
      for (int a = 0; a < 3; ++a) {
        if (a == b) continue;
        const double e = s.eps(a, b);
        CHECK(std::abs(observed(a, b) / nb - e) <= 4.0 * std::sqrt(e * (1.0 - e) / nb) + 1e-12);
      }
    }
  }
  SUBCASE("validation") {
    auto s = three_class_spec(2, 30, 1);
    s.pi = Eigen::Vector3d(0.3, 0.3, 0.3);
    CHECK_THROWS_AS(generate_multi_gmm(s), std::invalid_argument);
    s = three_class_spec(2, 30, 1);
    s.eps(1, 0) = 0.6; // column 0 now carries 1.1 of flip mass
    CHECK_THROWS_AS(generate_multi_gmm(s), std::invalid_argument);
    s = three_class_spec(2, 30, 1);
    s.eps(1, 0) = -0.1;
    CHECK_THROWS_AS(generate_multi_gmm(s), std::invalid_argument);
  }
}

TEST_CASE("label matrix") {
  const Eigen::Vector4i y(1, 3, 2, 1);
  SUBCASE("naive parameters give one-hot rows") {
    const Eigen::MatrixXd Y = build_label_matrix(y, 3, AlphaBeta::naive(3));
    Eigen::MatrixXd expected(4, 3);
    expected << 1, 0, 0, 0, 0, 1, 0, 1, 0, 1, 0, 0;
    CHECK(Y == expected);
  }
  SUBCASE("alpha = beta gives a constant matrix") {
    const Eigen::MatrixXd Y = build_label_matrix(y, 3, {Eigen::Vector3d::Constant(0.7), Eigen::Vector3d::Constant(0.7)});
    CHECK((Y.array() == 0.7).all());
  }
  SUBCASE("hand-built example") {
    const AlphaBeta ab{Eigen::Vector3d(2, 0, 1), Eigen::Vector3d(0, 1, -1)};
    Eigen::MatrixXd expected(4, 3);
    expected << 2, 1, -1,
                0, 1, 1,
                0, 0, -1,
                2, 1, -1;
    CHECK(build_label_matrix(y, 3, ab) == expected);
  }
  SUBCASE("row permutation commutes with construction") {
    const AlphaBeta ab{Eigen::Vector3d(0.3, -1, 2), Eigen::Vector3d(1.5, 0.2, -0.4)};
    Eigen::PermutationMatrix<Eigen::Dynamic> perm(4);
    perm.indices() << 2, 0, 3, 1;
    const Eigen::VectorXi yp = perm * y;
    CHECK(build_label_matrix(yp, 3, ab) == perm * build_label_matrix(y, 3, ab));
  }
  SUBCASE("out-of-range labels") {
    CHECK_THROWS_AS(build_label_matrix(Eigen::Vector2i(1, 4), 3, AlphaBeta::naive(3)), std::invalid_argument);
    CHECK_THROWS_AS(build_label_matrix(Eigen::Vector2i(0, 1), 3, AlphaBeta::naive(3)), std::invalid_argument);
    CHECK_THROWS_AS(build_label_matrix(y, 3, AlphaBeta::naive(2)), std::invalid_argument);
  }
}

TEST_CASE("multi-class training") {
  SUBCASE("toy instance against the explicit inverse") {
    Eigen::MatrixXd X(2, 4);
    X << 1, -1, 0.5, 2, 0, 1, -2, 0.5;
    const Eigen::MatrixXd Y = build_label_matrix(Eigen::Vector4i(1, 2, 2, 1), 2, {Eigen::Vector2d(1.5, -1), Eigen::Vector2d(0.2, 0.4)});
    const double gamma = 0.25;
    const Eigen::Matrix2d Q = (X * X.transpose() / 4.0 + gamma * Eigen::Matrix2d::Identity()).inverse();
    const Eigen::MatrixXd expected = Q * X * Y / 4.0;
    CHECK((train_multi_lpc(X, Y, gamma) - expected).cwiseAbs().maxCoeff() <= 1e-12);
  }
  SUBCASE("zero targets give zero weights") {
    const auto ds = generate_multi_gmm(three_class_spec(5, 30, 2));
    CHECK(train_multi_lpc(ds.X, Eigen::MatrixXd::Zero(30, 3), 1.0).isZero(0.0));
  }
  SUBCASE("normal equations hold column-wise") {
    const auto ds = generate_multi_gmm(three_class_spec(40, 120, 4));
    const Eigen::MatrixXd Y = build_label_matrix(ds.y_noisy, 3, {Eigen::Vector3d(1.2, 0.4, -0.3), Eigen::Vector3d(0.1, -0.5, 0.9)});
    const Eigen::MatrixXd W = train_multi_lpc(ds.X, Y, 0.5);
    const Eigen::MatrixXd lhs = (ds.X * ds.X.transpose() / 120.0 + 0.5 * Eigen::MatrixXd::Identity(40, 40)) * W;
    const Eigen::MatrixXd rhs = ds.X * Y / 120.0;
    for (int j = 0; j < 3; ++j) CHECK((lhs.col(j) - rhs.col(j)).norm() <= 1e-8 * rhs.col(j).norm());
  }
  SUBCASE("k = 2 naive reduces to the binary classifier") {
    const auto bin = generate_noisy_gmm(GmmSpec::isotropic(6, 50, 0.5, 1.0, 0.1, 0.2, 3));
    Eigen::VectorXi labels(50);
    for (Eigen::Index i = 0; i < 50; ++i) labels[i] = bin.y_noisy[i] > 0 ? 2 : 1;
    const Eigen::MatrixXd W = train_multi_lpc(bin.X, build_label_matrix(labels, 2, AlphaBeta::naive(2)), 0.7);
    const auto c = train_lpc(bin.X, bin.y_noisy, RhoParams::naive(), 0.7);
    CHECK(((W.col(1) - W.col(0)) - c.w).cwiseAbs().maxCoeff() <= 1e-12);
  }
  CHECK_THROWS_AS(train_multi_lpc(Eigen::MatrixXd::Ones(2, 3), Eigen::MatrixXd::Ones(3, 2), 0.0), std::invalid_argument);
}

TEST_CASE("argmax decisions") {
  Eigen::MatrixXd X = Eigen::MatrixXd::Identity(3, 3);
  CHECK(multi_accuracy(Eigen::MatrixXd::Identity(3, 3), X, Eigen::Vector3i(1, 2, 3)) == 1.0);
  CHECK(multi_predict(Eigen::MatrixXd::Zero(3, 3), X) == Eigen::Vector3i(1, 1, 1));
  Eigen::MatrixXd W(1, 3);
  W << 1, 2, 2;
  CHECK(multi_predict(W, Eigen::MatrixXd::Ones(1, 1))[0] == 2);
}

TEST_CASE("replicate shortcut matches explicit training") {
  const auto train = generate_multi_gmm(three_class_spec(30, 200, 5));
  const auto test = generate_multi_gmm(three_class_spec(30, 300, 6));
  const MultiReplicate rep(train, 3, test.X, test.y_clean, 0.8);
  for (const AlphaBeta& ab : {AlphaBeta::naive(3), AlphaBeta{Eigen::Vector3d(-1, 0.5, 1.7), Eigen::Vector3d(0.3, -1.2, 0.1)}}) {
    const Eigen::MatrixXd W = train_multi_lpc(train.X, build_label_matrix(train.y_noisy, 3, ab), 0.8);
    CHECK(rep.accuracy(ab) == doctest::Approx(multi_accuracy(W, test.X, test.y_clean)));
  }
}

TEST_CASE("alpha/beta search") {
  const auto spec = three_class_spec(20, 200, 8);
  SearchOptions opt;
  opt.candidates = 1;
  opt.seeds = {1, 2};
  opt.taus = {0.0, 0.5, 1.0};
  SUBCASE("a single candidate is both best and worst") {
    const auto r = search_alpha_beta(spec, opt);
    CHECK(r.best.alpha == r.worst.alpha);
    CHECK(r.best.beta == r.worst.beta);
    CHECK(r.best_accuracy == r.worst_accuracy);
    CHECK(r.path.size() == 3);
    for (const auto& pt : r.path) CHECK(pt.mean == r.best_accuracy);
  }
  SUBCASE("an injected naive point never beats the best") {
    opt.candidates = 40;
    opt.injected = {AlphaBeta::naive(3)};
    const auto r = search_alpha_beta(spec, opt);
    CHECK(r.naive_accuracy <= r.best_accuracy);
    CHECK(r.worst_accuracy <= r.naive_accuracy);
    CHECK(r.path.back().mean == r.best_accuracy);
    CHECK(r.path.front().mean == r.worst_accuracy);
  }
  SUBCASE("reruns and thread counts reproduce bit-identically") {
    opt.candidates = 60;
    const auto a = search_alpha_beta(spec, opt);
    opt.threads = 3;
    const auto b = search_alpha_beta(spec, opt);
    std::ostringstream sa, sb;
    write_tau_csv(sa, a, opt.seeds);
    write_tau_csv(sb, b, opt.seeds);
    CHECK(sa.str() == sb.str());
    CHECK(a.best.alpha == b.best.alpha);
    CHECK(sa.str().rfind("tau,mean,std,seed_1,seed_2\n", 0) == 0);
  }
  SUBCASE("interpolation endpoints") {
    const AlphaBeta w{Eigen::Vector3d(0, 0, 0), Eigen::Vector3d(1, 1, 1)};
    const AlphaBeta b{Eigen::Vector3d(2, 2, 2), Eigen::Vector3d(-1, -1, -1)};
    CHECK(interpolate(w, b, 0.0).alpha == w.alpha);
    CHECK(interpolate(w, b, 1.0).beta == b.beta);
    CHECK(interpolate(w, b, 0.5).alpha == Eigen::Vector3d::Ones());
  }
}
