#include "ccmaae/checkpoint.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace ccmaae {

namespace {

using nlohmann::json;

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw std::runtime_error("checkpoint: expected matrix");
  const Index rows = static_cast<Index>(j.size());
  const Index cols = static_cast<Index>(j[0].size());
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    if (static_cast<Index>(j[i].size()) != cols)
      throw std::runtime_error("checkpoint: ragged matrix rows");
    for (Index c = 0; c < cols; ++c) m(i, c) = j[i][c].get<double>();
  }
  return m;
}

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Vector vector_from_json(const json& j) {
  Vector v(static_cast<Index>(j.size()));
  for (Index i = 0; i < v.size(); ++i) v[i] = j[i].get<double>();
  return v;
}

json stack_to_json(const MlpStack& stack) {
  json layers = json::array();
  for (const DenseLayer& layer : stack.layers) {
    layers.push_back({{"activation", activation_name(layer.activation)},
                      {"leaky_alpha", layer.leaky_alpha},
                      {"weights", matrix_to_json(layer.weights)},
                      {"bias", vector_to_json(layer.bias)}});
  }
  return {{"l2", stack.l2}, {"layers", std::move(layers)}};
}

MlpStack stack_from_json(const json& j) {
  MlpStack stack;
  stack.l2 = j.at("l2").get<double>();
  for (const json& lj : j.at("layers")) {
    DenseLayer layer;
    layer.activation = activation_from_name(lj.at("activation").get<std::string>());
    layer.leaky_alpha = lj.at("leaky_alpha").get<double>();
    layer.weights = matrix_from_json(lj.at("weights"));
    layer.bias = vector_from_json(lj.at("bias"));
    stack.layers.push_back(std::move(layer));
  }
  validate_stack(stack);
  return stack;
}

json adam_to_json(const AdamState& state) {
  json moments = json::array();
  for (const AdamState::Moments& m : state.moments) {
    moments.push_back({{"m_w", matrix_to_json(m.m_w)},
                       {"v_w", matrix_to_json(m.v_w)},
                       {"m_b", vector_to_json(m.m_b)},
                       {"v_b", vector_to_json(m.v_b)}});
  }
  return {{"learning_rate", state.config.learning_rate},
          {"beta1", state.config.beta1},
          {"beta2", state.config.beta2},
          {"epsilon", state.config.epsilon},
          {"step_count", state.step_count},
          {"moments", std::move(moments)}};
}

AdamState adam_from_json(const json& j) {
  AdamState state;
  state.config.learning_rate = j.at("learning_rate").get<double>();
  state.config.beta1 = j.at("beta1").get<double>();
  state.config.beta2 = j.at("beta2").get<double>();
  state.config.epsilon = j.at("epsilon").get<double>();
  state.step_count = j.at("step_count").get<std::int64_t>();
  for (const json& mj : j.at("moments")) {
    AdamState::Moments m;
    m.m_w = matrix_from_json(mj.at("m_w"));
    m.v_w = matrix_from_json(mj.at("v_w"));
    m.m_b = vector_from_json(mj.at("m_b"));
    m.v_b = vector_from_json(mj.at("v_b"));
    state.moments.push_back(std::move(m));
  }
  return state;
}

}  // namespace

void save_checkpoint(const std::string& path, const CcmAae& model,
                     const AaeOptimizers* optimizers) {
  json j = {{"format", "ccm-aae-checkpoint"},
            {"version", 1},
            {"kappa", model.curvature.kappa()},
            {"sigma_m", model.width.value()},
            {"project_before_decode", model.project_before_decode},
            {"encoder", stack_to_json(model.encoder)},
            {"decoder", stack_to_json(model.decoder)},
            {"critic", stack_to_json(model.critic)}};
  if (optimizers != nullptr) {
    j["optimizers"] = {{"encoder", adam_to_json(optimizers->encoder)},
                       {"decoder", adam_to_json(optimizers->decoder)},
                       {"critic", adam_to_json(optimizers->critic)}};
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_checkpoint: cannot write " + path);
  out << j.dump(1) << '\n';
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error("load_checkpoint: " + path + ": " + e.what());
  }
  if (j.value("format", "") != "ccm-aae-checkpoint" || j.value("version", 0) != 1)
    throw std::runtime_error("load_checkpoint: " + path + ": not a v1 ccm-aae checkpoint");

  Checkpoint cp{CcmAae{stack_from_json(j.at("encoder")), stack_from_json(j.at("decoder")),
                       stack_from_json(j.at("critic")), Curvature(j.at("kappa").get<int>()),
                       MembershipWidth(j.at("sigma_m").get<double>()),
                       j.at("project_before_decode").get<bool>()},
                std::nullopt};
  validate_model(cp.model);
  if (j.contains("optimizers")) {
    AaeOptimizers opt;
    opt.encoder = adam_from_json(j["optimizers"].at("encoder"));
    opt.decoder = adam_from_json(j["optimizers"].at("decoder"));
    opt.critic = adam_from_json(j["optimizers"].at("critic"));
    cp.optimizers = std::move(opt);
  }
  return cp;
}

}  // namespace ccmaae
