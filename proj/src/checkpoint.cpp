#include "nasgnn/checkpoint.hpp"

#include <sstream>

#include <json.hpp>

#include "nasgnn/io_util.hpp"

namespace nasgnn {

namespace {

void write_params_json(std::ostringstream& out, const ParamRegistry& reg,
                       const ParamSnapshot* values) {
  out << "\"params\":{";
  bool first = true;
  for (const auto& [name, p] : reg) {
    const ad::Matrix& m =
        values != nullptr ? values->at(name) : p.value;
    if (!first) out << ',';
    first = false;
    out << '"' << name << "\":{\"shape\":[" << m.rows() << ',' << m.cols()
        << "],\"values\":[";
    bool first_value = true;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        if (!first_value) out << ',';
        first_value = false;
        out << format_double(m(r, c));
      }
    }
    out << "]}";
  }
  out << '}';
}

void load_params(const nlohmann::json& j, ParamRegistry& reg) {
  const auto& params = j.at("params");
  for (auto& [name, p] : reg) {
    if (!params.contains(name)) {
      throw DimensionMismatchError("checkpoint: missing parameter " + name);
    }
    const auto& entry = params.at(name);
    const auto& shape = entry.at("shape");
    const auto rows = shape.at(0).get<Eigen::Index>();
    const auto cols = shape.at(1).get<Eigen::Index>();
    if (rows != p.value.rows() || cols != p.value.cols()) {
      throw DimensionMismatchError(
          "checkpoint: parameter " + name + " has shape " +
          std::to_string(rows) + "x" + std::to_string(cols) + ", expected " +
          std::to_string(p.value.rows()) + "x" +
          std::to_string(p.value.cols()));
    }
    const auto& values = entry.at("values");
    if (static_cast<Eigen::Index>(values.size()) != rows * cols) {
      throw DimensionMismatchError("checkpoint: parameter " + name + " has " +
                                   std::to_string(values.size()) +
                                   " values for shape " +
                                   std::to_string(rows) + "x" +
                                   std::to_string(cols));
    }
    Eigen::Index i = 0;
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) {
        p.value(r, c) = values.at(i++).get<double>();
      }
    }
  }
  if (params.size() != reg.size()) {
    throw DimensionMismatchError(
        "checkpoint: holds " + std::to_string(params.size()) +
        " parameters, model expects " + std::to_string(reg.size()));
  }
}

const char* kind_name(CheckpointKind kind) {
  switch (kind) {
    case CheckpointKind::Gnn: return "gnn";
    case CheckpointKind::MlpOneHot: return "mlp_onehot";
    case CheckpointKind::MlpDepthWidth: return "mlp_depthwidth";
  }
  return "?";
}

}  // namespace

void save_checkpoint(const std::string& path, const SurrogateModel& model,
                     const ParamSnapshot& values) {
  std::ostringstream out;
  out << "{\"format_version\":1,\"model\":\"gnn\",\"d_n\":"
      << model.config().d_n << ",\"d_g\":" << model.config().d_g
      << ",\"rounds\":" << model.config().rounds << ',';
  write_params_json(out, model.params(), &values);
  out << '}';
  atomic_write_file(path, out.str());
}

void save_checkpoint(const std::string& path, const SurrogateModel& model) {
  save_checkpoint(path, model, snapshot(model.params()));
}

void save_checkpoint(const std::string& path, const BaselineMlp& model,
                     const ParamSnapshot& values) {
  const CheckpointKind kind = model.kind() == FeatureKind::OneHot
                                  ? CheckpointKind::MlpOneHot
                                  : CheckpointKind::MlpDepthWidth;
  std::ostringstream out;
  out << "{\"format_version\":1,\"model\":\"" << kind_name(kind)
      << "\",\"input_dim\":" << model.input_dim() << ',';
  write_params_json(out, model.params(), &values);
  out << '}';
  atomic_write_file(path, out.str());
}

void save_checkpoint(const std::string& path, const BaselineMlp& model) {
  save_checkpoint(path, model, snapshot(model.params()));
}

CheckpointKind peek_checkpoint_kind(const std::string& path) {
  const auto j = nlohmann::json::parse(read_file(path));
  const std::string model = j.value("model", "gnn");
  if (model == "gnn") return CheckpointKind::Gnn;
  if (model == "mlp_onehot") return CheckpointKind::MlpOneHot;
  if (model == "mlp_depthwidth") return CheckpointKind::MlpDepthWidth;
  throw DimensionMismatchError("checkpoint: unknown model kind " + model);
}

SurrogateModel load_surrogate_checkpoint(const std::string& path) {
  const auto j = nlohmann::json::parse(read_file(path));
  if (j.value("format_version", 0) != 1) {
    throw DimensionMismatchError("checkpoint: unsupported format_version");
  }
  if (j.value("model", "gnn") != "gnn") {
    throw DimensionMismatchError("checkpoint: not a gnn checkpoint");
  }
  EncoderConfig config;
  config.d_n = j.at("d_n").get<int>();
  config.d_g = j.at("d_g").get<int>();
  config.rounds = j.at("rounds").get<int>();
  SurrogateModel model = SurrogateModel::create(config, 0);
  load_params(j, model.params());
  return model;
}

BaselineMlp load_baseline_checkpoint(const std::string& path) {
  const auto j = nlohmann::json::parse(read_file(path));
  if (j.value("format_version", 0) != 1) {
    throw DimensionMismatchError("checkpoint: unsupported format_version");
  }
  const std::string model_name = j.value("model", "");
  FeatureKind kind;
  if (model_name == "mlp_onehot") {
    kind = FeatureKind::OneHot;
  } else if (model_name == "mlp_depthwidth") {
    kind = FeatureKind::DepthWidth;
  } else {
    throw DimensionMismatchError("checkpoint: not a baseline checkpoint");
  }
  BaselineMlp model = BaselineMlp::create(kind, 0);
  if (j.at("input_dim").get<int>() != model.input_dim()) {
    throw DimensionMismatchError("checkpoint: input_dim " +
                                 std::to_string(j.at("input_dim").get<int>()) +
                                 " does not match feature kind");
  }
  load_params(j, model.params());
  return model;
}

}  // namespace nasgnn
