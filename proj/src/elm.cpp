#include "pvsde/elm.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/QR>

#include "pvsde/error.hpp"
#include "pvsde/serialize.hpp"

namespace pvsde {

FeatureScaler FeatureScaler::fit(const Eigen::MatrixXd& rows) {
    require(rows.rows() >= 1, ErrorKind::Data, "cannot fit a scaler on zero rows");
    FeatureScaler s;
    s.mean = rows.colwise().mean().transpose();
    s.stddev.resize(rows.cols());
    for (Eigen::Index j = 0; j < rows.cols(); ++j) {
        const double var = (rows.col(j).array() - s.mean(j)).square().mean();
        const double sd = std::sqrt(var);
        s.stddev(j) = sd > 1e-12 * std::max(1.0, std::abs(s.mean(j))) ? sd : 1.0;
    }
    return s;
}

Eigen::MatrixXd FeatureScaler::apply(const Eigen::MatrixXd& rows) const {
    if (empty()) return rows;
    require(rows.cols() == mean.size(), ErrorKind::Dimension, "scaler dimension mismatch");
    return (rows.rowwise() - mean.transpose()).array().rowwise() / stddev.transpose().array();
}

Eigen::VectorXd FeatureScaler::apply(const Eigen::VectorXd& x) const {
    if (empty()) return x;
    require(x.size() == mean.size(), ErrorKind::Dimension, "scaler dimension mismatch");
    return (x - mean).array() / stddev.array();
}

ElmModel elm_init(Eigen::Index input_dim, Eigen::Index hidden, Rng& rng) {
    require(hidden >= 1 && input_dim >= 1, ErrorKind::Config, "ELM needs hidden >= 1 and input_dim >= 1");
    ElmModel m;
    m.input_dim = input_dim;
    m.hidden = hidden;
    m.input_weights.resize(hidden, input_dim);
    for (Eigen::Index k = 0; k < hidden; ++k)
        for (Eigen::Index j = 0; j < input_dim; ++j) m.input_weights(k, j) = rng.normal();
    m.biases.resize(hidden);
    for (Eigen::Index k = 0; k < hidden; ++k) m.biases(k) = rng.normal();
    m.output_weights = Eigen::VectorXd::Zero(hidden);
    return m;
}

Eigen::MatrixXd hidden_layer(const ElmModel& model, const Eigen::MatrixXd& scaled_inputs) {
    require(scaled_inputs.cols() == model.input_dim, ErrorKind::Dimension,
            "ELM input has " + std::to_string(scaled_inputs.cols()) + " features, expected " +
                std::to_string(model.input_dim));
    Eigen::MatrixXd z = scaled_inputs * model.input_weights.transpose();
    z.rowwise() += model.biases.transpose();
    return (1.0 + (-z.array()).exp()).inverse().matrix();
}

ElmTrainResult elm_train(ElmModel model, const TrainSet& data, double ridge, bool fit_scaler) {
    require(data.size() >= 1, ErrorKind::Data, "ELM training set is empty");
    require(data.targets.size() == data.inputs.rows(), ErrorKind::Dimension, "targets/inputs size mismatch");
    require(ridge >= 0.0, ErrorKind::Config, "ridge must be non-negative");
    require(data.inputs.allFinite() && data.targets.allFinite(), ErrorKind::Data,
            "ELM training data contains non-finite values");

    if (fit_scaler) model.scaler = FeatureScaler::fit(data.inputs);
    const Eigen::MatrixXd h = hidden_layer(model, model.scaler.apply(data.inputs));
    const Eigen::Index n = h.rows();
    const Eigen::Index k = h.cols();

    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
    cod.setThreshold(1e-10);
    if (ridge > 0.0) {
        Eigen::MatrixXd a(n + k, k);
        a.topRows(n) = h;
        a.bottomRows(k) = std::sqrt(ridge) * Eigen::MatrixXd::Identity(k, k);
        Eigen::VectorXd y = Eigen::VectorXd::Zero(n + k);
        y.head(n) = data.targets;
        cod.compute(a);
        model.output_weights = cod.solve(y);
    } else {
        cod.compute(h);
        model.output_weights = cod.solve(data.targets);
    }

    ElmTrainResult result;
    const Eigen::VectorXd residual = h * model.output_weights - data.targets;
    result.max_residual = residual.cwiseAbs().maxCoeff();
    result.rms_residual = std::sqrt(residual.squaredNorm() / static_cast<double>(n));
    result.model = std::move(model);
    return result;
}

double elm_predict(const ElmModel& model, const Eigen::VectorXd& x) {
    require(x.size() == model.input_dim, ErrorKind::Dimension, "ELM input dimension mismatch");
    const Eigen::VectorXd s = model.scaler.apply(x);
    const Eigen::VectorXd z = model.input_weights * s + model.biases;
    return (1.0 + (-z.array()).exp()).inverse().matrix().dot(model.output_weights);
}

Eigen::VectorXd elm_predict(const ElmModel& model, const Eigen::MatrixXd& rows) {
    return hidden_layer(model, model.scaler.apply(rows)) * model.output_weights;
}

nlohmann::json elm_to_json(const ElmModel& model) {
    nlohmann::json j;
    j["format_version"] = kElmFormatVersion;
    j["input_dim"] = model.input_dim;
    j["hidden"] = model.hidden;
    j["activation"] = "sigmoid";
    j["input_weights"] = encode_matrix(model.input_weights);
    j["biases"] = encode_vector(model.biases);
    j["output_weights"] = encode_vector(model.output_weights);
    if (!model.scaler.empty()) {
        j["scaler"] = {{"mean", encode_vector(model.scaler.mean)}, {"stddev", encode_vector(model.scaler.stddev)}};
    }
    return j;
}

ElmModel elm_from_json(const nlohmann::json& j) {
    require(j.value("format_version", 0) == kElmFormatVersion, ErrorKind::Data, "unsupported ELM format version");
    ElmModel m;
    m.input_dim = j.at("input_dim").get<Eigen::Index>();
    m.hidden = j.at("hidden").get<Eigen::Index>();
    m.input_weights = decode_matrix(j.at("input_weights").get<std::string>(), m.hidden, m.input_dim);
    m.biases = decode_vector(j.at("biases").get<std::string>(), m.hidden);
    m.output_weights = decode_vector(j.at("output_weights").get<std::string>(), m.hidden);
    if (j.contains("scaler")) {
        m.scaler.mean = decode_vector(j["scaler"].at("mean").get<std::string>(), m.input_dim);
        m.scaler.stddev = decode_vector(j["scaler"].at("stddev").get<std::string>(), m.input_dim);
    }
    return m;
}

}  // namespace pvsde
