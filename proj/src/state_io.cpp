#include "wdeloc/state_io.hpp"

#include <fstream>
#include <json.hpp>

namespace wdeloc {

namespace {

Eigen::MatrixXcd parse_entries(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("dim") || !doc.contains("re") ||
      !doc.contains("im")) {
    throw Error(ErrorKind::MalformedInput,
                "state file must be {\"dim\", \"re\", \"im\"}");
  }
  if (!doc["dim"].is_number_integer()) {
    throw Error(ErrorKind::MalformedInput, "\"dim\" must be an integer");
  }
  const long long n = doc["dim"].get<long long>();
  if (n < 1 || n > 4096) {
    throw Error(ErrorKind::MalformedInput, "\"dim\" out of supported range");
  }
  const auto& re = doc["re"];
  const auto& im = doc["im"];
  if (!re.is_array() || !im.is_array() ||
      re.size() != static_cast<std::size_t>(n * n) ||
      im.size() != static_cast<std::size_t>(n * n)) {
    throw Error(ErrorKind::MalformedInput,
                "\"re\"/\"im\" must be row-major n^2 arrays");
  }
  Eigen::MatrixXcd entries(n, n);
  for (long long i = 0; i < n; ++i) {
    for (long long j = 0; j < n; ++j) {
      const std::size_t idx = static_cast<std::size_t>(i * n + j);
      if (!re[idx].is_number() || !im[idx].is_number()) {
        throw Error(ErrorKind::MalformedInput, "matrix entries must be numbers");
      }
      entries(i, j) = {re[idx].get<double>(), im[idx].get<double>()};
    }
  }
  return entries;
}

}  // namespace

DensityMatrix load_state(std::istream& in) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::MalformedInput, std::string("bad JSON: ") + e.what());
  }
  return DensityMatrix(parse_entries(doc));
}

DensityMatrix load_state_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::MalformedInput, "cannot open state file " + path);
  }
  return load_state(in);
}

void save_state(const DensityMatrix& rho, std::ostream& out) {
  const int n = rho.dim();
  nlohmann::ordered_json doc;
  doc["dim"] = n;
  std::vector<double> re, im;
  re.reserve(std::size_t(n) * n);
  im.reserve(std::size_t(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      re.push_back(rho(i, j).real());
      im.push_back(rho(i, j).imag());
    }
  }
  doc["re"] = re;
  doc["im"] = im;
  out << doc.dump() << "\n";
}

void save_state_file(const DensityMatrix& rho, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorKind::MalformedInput, "cannot open output file " + path);
  }
  save_state(rho, out);
}

}  // namespace wdeloc
