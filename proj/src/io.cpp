#include "ccmaae/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ccmaae {

std::string format_double(double v) {
  char buf[32];
  for (int prec = 15; prec <= 17; ++prec) {  // shortest repr that parses back exactly
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

std::string history_to_csv(const TrainHistory& history) {
  std::string out =
      "epoch,reconstruction_loss,critic_loss,adversarial_loss,mean_membership,validation_loss\n";
  for (size_t e = 0; e < history.epochs.size(); ++e) {
    const EpochStats& s = history.epochs[e];
    out += std::to_string(e) + ',' + format_double(s.reconstruction_loss) + ',' +
           format_double(s.critic_loss) + ',' + format_double(s.adversarial_loss) + ',' +
           format_double(s.mean_membership) + ',' + format_double(s.validation_loss) + '\n';
  }
  return out;
}

std::string pixel_rows_to_csv(const std::string& index_name, const Matrix& rows) {
  std::string out = index_name;
  for (Index j = 0; j < rows.cols(); ++j) out += ",pixel_" + std::to_string(j);
  out += '\n';
  for (Index i = 0; i < rows.rows(); ++i) {
    out += std::to_string(i);
    for (Index j = 0; j < rows.cols(); ++j) out += ',' + format_double(rows(i, j));
    out += '\n';
  }
  return out;
}

std::string chart_to_csv(const Matrix& uv, const IntVector& labels) {
  if (uv.rows() != labels.size() || uv.cols() != 2)
    throw std::invalid_argument("chart_to_csv: expected n x 2 chart and n labels");
  std::string out = "u,v,label\n";
  for (Index i = 0; i < uv.rows(); ++i)
    out += format_double(uv(i, 0)) + "," + format_double(uv(i, 1)) + ',' +
           std::to_string(labels[i]) + '\n';
  return out;
}

std::string dataset_to_csv(const ImageDataset& ds) {
  std::string out;
  for (Index j = 0; j < ds.width(); ++j) out += (j ? ",pixel_" : "pixel_") + std::to_string(j);
  out += ",label\n";
  for (Index i = 0; i < ds.size(); ++i) {
    for (Index j = 0; j < ds.width(); ++j) {
      if (j) out += ',';
      out += format_double(ds.pixels(i, j));
    }
    out += ',' + std::to_string(ds.labels[i]) + '\n';
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_text_file: cannot write " + path);
  out << content;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_text_file: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace ccmaae
