#include <doctest.h>

#include "fairsched/lr.hpp"
#include "fairsched/optimize.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <sstream>

using namespace fairsched;

namespace {

struct Problem {
    Matrix X;
    Vector y;
    std::vector<std::string> names;
};

Problem random_problem(std::mt19937_64& rng, int n, int p, double scale = 1.0) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Problem pr;
    pr.X.resize(n, p);
    pr.y.resize(n);
    Vector truth(p);
    for (int j = 0; j < p; ++j) {
        truth(j) = normal(rng);
        pr.names.push_back("f" + std::to_string(j));
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < p; ++j) pr.X(i, j) = scale * normal(rng) + (j % 2 ? 3.0 : 0.0);
        const double z = pr.X.row(i).dot(truth) / scale - 0.5;
        pr.y(i) = unit(rng) < 1.0 / (1.0 + std::exp(-z)) ? 1.0 : 0.0;
    }
    pr.y(0) = 1.0;
    pr.y(1) = 0.0;
    return pr;
}

TrainedModel model_from(const Vector& theta, const std::vector<std::string>& names) {
    TrainedModel m;
    m.feature_names = names;
    const auto p = static_cast<Eigen::Index>(names.size());
    for (Eigen::Index j = 0; j < p; ++j) m.coefficients.push_back(theta(j));
    m.intercept = theta(p);
    return m;
}

// Independent reference: Newton's method on the same penalised mean log-loss.
Vector newton_reference(const Matrix& X, const Vector& y, double l2) {
    const Eigen::Index n = X.rows(), p = X.cols();
    Matrix A(n, p + 1);
    A << X, Vector::Ones(n);
    Vector theta = Vector::Zero(p + 1);
    Vector reg = Vector::Constant(p + 1, l2);
    reg(p) = 0.0;
    for (int it = 0; it < 100; ++it) {
        const Vector z = A * theta;
        const Vector mu = z.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
        const Vector g = A.transpose() * (mu - y) / static_cast<double>(n) + reg.cwiseProduct(theta);
        const Vector w = mu.cwiseProduct(Vector::Ones(n) - mu);
        Matrix H = A.transpose() * w.asDiagonal() * A / static_cast<double>(n);
        H.diagonal() += reg;
        const Vector step = H.ldlt().solve(g);
        theta -= step;
        if (step.norm() < 1e-14) break;
    }
    return theta;
}

}  // namespace

TEST_CASE("gradient matches central finite differences") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int instance = 0; instance < 20; ++instance) {
        const int p = 2 + instance % 5;
        const auto pr = random_problem(rng, 40 + instance, p);
        Vector theta(p + 1);
        for (int j = 0; j <= p; ++j) theta(j) = normal(rng);
        const double l2 = instance % 2 ? 0.1 : 1e-4;
        const auto at = log_loss_and_gradient(model_from(theta, pr.names), pr.X, pr.y, l2);
        for (int j = 0; j <= p; ++j) {
            const double h = 1e-6;
            Vector up = theta, down = theta;
            up(j) += h;
            down(j) -= h;
            const double fd = (log_loss_and_gradient(model_from(up, pr.names), pr.X, pr.y, l2).loss -
                               log_loss_and_gradient(model_from(down, pr.names), pr.X, pr.y, l2).loss) /
                              (2 * h);
            const double g = at.gradient(j);
            CHECK(std::abs(g - fd) <= 1e-5 * std::max(1.0, std::abs(g)));
        }
    }
}

TEST_CASE("loss splits into log-likelihood and penalty") {
    Matrix X(2, 1);
    X << 1.0, -1.0;
    Vector y(2);
    y << 1.0, 0.0;
    TrainedModel m{{"x"}, {2.0}, 0.0};
    const auto r = log_loss_and_gradient(m, X, y, 0.5);
    // Both rows have z = +-2 on the correct side: loss = log(1 + e^-2) each.
    CHECK(r.loss == doctest::Approx(std::log1p(std::exp(-2.0)) + 0.25 * 4.0));
    CHECK(r.penalty == doctest::Approx(1.0));
}

TEST_CASE("fit agrees with an independent Newton solver") {
    std::mt19937_64 rng(5);
    for (int instance = 0; instance < 5; ++instance) {
        const auto pr = random_problem(rng, 300, 4, instance % 2 ? 10.0 : 1.0);
        const double l2 = 1e-3;
        const Vector ref = newton_reference(pr.X, pr.y, l2);
        for (bool standardize : {false, true}) {
            TrainConfig cfg;
            cfg.l2_weight = l2;
            cfg.standardize = standardize;
            cfg.convergence_tolerance = 1e-10;
            cfg.max_iterations = 20000;
            const auto fit = fit_logistic(pr.X, pr.y, pr.names, cfg);
            CHECK(fit.status == TrainStatus::Converged);
            for (int j = 0; j < 4; ++j) CHECK(fit.model.coefficients[j] == doctest::Approx(ref(j)).epsilon(1e-6));
            CHECK(fit.model.intercept == doctest::Approx(ref(4)).epsilon(1e-6));
            // Loss trace never increases.
            for (std::size_t k = 1; k < fit.loss_trace.size(); ++k)
                CHECK(fit.loss_trace[k] <= fit.loss_trace[k - 1] + 1e-15);
        }
    }
}

TEST_CASE("sample weights act like duplicated rows") {
    std::mt19937_64 rng(3);
    const auto pr = random_problem(rng, 60, 3);
    Matrix Xd(61, 3);
    Xd << pr.X, pr.X.row(7);
    Vector yd(61);
    yd << pr.y, pr.y(7);
    Vector w = Vector::Ones(60);
    w(7) = 2.0;
    TrainConfig cfg;
    cfg.convergence_tolerance = 1e-10;
    FitOptions opts;
    opts.sample_weights = &w;
    const auto a = fit_logistic(pr.X, pr.y, pr.names, cfg, opts);
    const auto b = fit_logistic(Xd, yd, pr.names, cfg);
    for (int j = 0; j < 3; ++j) CHECK(a.model.coefficients[j] == doctest::Approx(b.model.coefficients[j]).epsilon(1e-6));
}

TEST_CASE("one-class labels are rejected") {
    Matrix X = Matrix::Ones(4, 1);
    CHECK_THROWS_AS(fit_logistic(X, Vector::Ones(4), {"x"}, TrainConfig{}), DegenerateLabels);
    CHECK_THROWS_AS(fit_logistic(X, Vector::Zero(4), {"x"}, TrainConfig{}), DegenerateLabels);
    CHECK_THROWS_AS(fit_logistic(Matrix(0, 1), Vector(0), {"x"}, TrainConfig{}), DegenerateLabels);
    CHECK_THROWS_AS(fit_logistic(X, Vector::Ones(4), {"x", "y"}, TrainConfig{}), UsageError);
}

TEST_CASE("scores are probabilities of the linear term") {
    TrainedModel m{{"Inspectorpurple", "temperatureMax"}, {1.5, 0.01}, -2.0};
    FeatureRow row;
    row.inspection_id = "A";
    row.values[*feature_index("Inspectorpurple")] = 1.0;
    row.values[*feature_index("temperatureMax")] = 50.0;
    const auto s = predict_score(m, row);
    CHECK(s.inspection_id == "A");
    CHECK(s.score == doctest::Approx(1.0 / (1.0 + std::exp(0.0))));
    CHECK(sigmoid(-800.0) >= 0.0);
    CHECK(sigmoid(800.0) == 1.0);
    CHECK(std::isfinite(sigmoid(-800.0)));
    TrainedModel bad{{"nonexistent"}, {1.0}, 0.0};
    CHECK_THROWS_AS(bad.linear_term(row), UsageError);
}

TEST_CASE("model file round-trips exactly") {
    std::mt19937_64 rng(9);
    const auto pr = random_problem(rng, 100, 3);
    auto fit = fit_logistic(pr.X, pr.y, pr.names, TrainConfig{});
    std::ostringstream first;
    write_model(first, fit.model);
    std::istringstream in(first.str());
    const TrainedModel back = read_model(in);
    CHECK(back.feature_names == fit.model.feature_names);
    CHECK(back.coefficients == fit.model.coefficients);
    CHECK(back.intercept == fit.model.intercept);
    std::ostringstream second;
    write_model(second, back);
    CHECK(first.str() == second.str());

    std::istringstream broken("f0\t1.0\nf1\tnot-a-number\n__intercept__\t0\n");
    CHECK_THROWS_AS(read_model(broken), DataError);
    std::istringstream no_intercept("f0\t1.0\n");
    CHECK_THROWS_AS(read_model(no_intercept), DataError);
}

TEST_CASE("train_logistic on feature rows uses all sixteen features") {
    std::vector<FeatureRow> rows(40);
    std::vector<bool> labels(40);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rows[i].inspection_id = std::to_string(i);
        const Cluster c = kAllClusters[i % kClusterCount];
        rows[i].values[cluster_feature_index(c)] = 1.0;
        rows[i].values[kTimeSinceLast] = static_cast<double>(i % 5);
        labels[i] = (i % 3) == 0;
    }
    const auto fit = train_logistic(rows, labels);
    CHECK(fit.model.feature_names.size() == kFeatureCount);
    CHECK(fit.model.has_cluster_features());
}

TEST_CASE("minimizer solves a convex quadratic") {
    Matrix A(3, 3);
    A << 4, 1, 0, 1, 3, 0.5, 0, 0.5, 2;
    Vector b(3);
    b << 1, -2, 3;
    Objective f = [&](const Vector& x, Vector& g) {
        g = A * x - b;
        return 0.5 * x.dot(A * x) - b.dot(x);
    };
    MinimizeOptions o;
    o.gradient_tolerance = 1e-12;
    const auto r = minimize(f, Vector::Zero(3), o);
    const Vector exact = A.ldlt().solve(b);
    CHECK(r.status == MinimizeStatus::Converged);
    CHECK((r.x - exact).norm() < 1e-9);
}
