#pragma once

#include <cmath>
#include <cstddef>
#include <string>

#include <Eigen/Core>
#include <json.hpp>

#include "pvsde/rng.hpp"

namespace pvsde {

/// Per-feature standardization. An empty scaler is the identity.
struct FeatureScaler {
    Eigen::VectorXd mean;
    Eigen::VectorXd stddev;

    bool empty() const { return mean.size() == 0; }

    /// Zero-variance features get stddev 1.
    static FeatureScaler fit(const Eigen::MatrixXd& rows);

    Eigen::MatrixXd apply(const Eigen::MatrixXd& rows) const;
    Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
};

struct TrainSet {
    Eigen::MatrixXd inputs;   // N x input_dim
    Eigen::VectorXd targets;  // N

    std::size_t size() const { return static_cast<std::size_t>(inputs.rows()); }
};

/// Single-hidden-layer extreme learning machine with sigmoid activation:
///   y(x) = sum_j v_j f(w_j . s(x) + b_j)
/// where s is the input scaler. w and b are frozen after elm_init.
struct ElmModel {
    Eigen::Index input_dim = 0;
    Eigen::Index hidden = 0;
    Eigen::MatrixXd input_weights;  // hidden x input_dim
    Eigen::VectorXd biases;         // hidden
    Eigen::VectorXd output_weights; // hidden
    FeatureScaler scaler;
};

struct ElmTrainResult {
    ElmModel model;
    double max_residual = 0.0;
    double rms_residual = 0.0;
};

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

/// Draws w (row-major, hidden x input_dim) and then b from N(0, 1).
ElmModel elm_init(Eigen::Index input_dim, Eigen::Index hidden, Rng& rng);

/// Hidden-layer output matrix H (N x hidden) for already-scaled inputs.
Eigen::MatrixXd hidden_layer(const ElmModel& model, const Eigen::MatrixXd& scaled_inputs);

/// Output weights by least squares on H (pseudoinverse through a complete
/// orthogonal decomposition with relative cutoff 1e-10). ridge > 0 adds
/// ridge * ||v||^2 to the loss. When fit_scaler is set the model's scaler is
/// fitted on data.inputs first; otherwise the existing scaler is used.
ElmTrainResult elm_train(ElmModel model, const TrainSet& data, double ridge = 1e-8, bool fit_scaler = true);

double elm_predict(const ElmModel& model, const Eigen::VectorXd& x);
Eigen::VectorXd elm_predict(const ElmModel& model, const Eigen::MatrixXd& rows);

/// JSON with base64-encoded little-endian float64 row-major matrices.
nlohmann::json elm_to_json(const ElmModel& model);
ElmModel elm_from_json(const nlohmann::json& j);

inline constexpr int kElmFormatVersion = 1;

}  // namespace pvsde
