#include "lpc/classifier_io.hpp"

#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <string>

namespace lpc {

namespace {
constexpr const char* kMagic = "lpc-classifier";
constexpr int kVersion = 1;
} // namespace

void write_classifier(std::ostream& out, const Classifier<double>& c) {
  out << kMagic << ' ' << kVersion << '\n';
  out << c.p() << ' ' << (c.loss == LossKind::bce ? "bce" : "squared") << '\n';
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < c.p(); ++i) out << c.w[i] << '\n';
  out << c.gamma << '\n' << c.rho.rho_plus() << '\n' << c.rho.rho_minus() << '\n';
}

Classifier<double> read_classifier(std::istream& in) {
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != kMagic) throw ConfigError("not a classifier file");
  if (version != kVersion) throw ConfigError("unsupported classifier version " + std::to_string(version));
  Eigen::Index p = 0;
  std::string loss;
  if (!(in >> p >> loss) || p < 0) throw ConfigError("malformed classifier header");
  if (loss != "squared" && loss != "bce") throw ConfigError("unknown loss kind '" + loss + "'");

  Classifier<double> c;
  c.w.resize(p);
  for (Eigen::Index i = 0; i < p; ++i) {
    if (!(in >> c.w[i])) throw ConfigError("classifier file truncated at weight " + std::to_string(i));
  }
  double rho_plus = 0.0, rho_minus = 0.0;
  if (!(in >> c.gamma >> rho_plus >> rho_minus)) throw ConfigError("classifier file missing gamma/rho");
  c.rho = RhoParams(rho_plus, rho_minus);
  c.loss = loss == "bce" ? LossKind::bce : LossKind::squared;
  return c;
}

void save_classifier(const std::filesystem::path& path, const Classifier<double>& c) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  write_classifier(out, c);
}

Classifier<double> load_classifier(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  return read_classifier(in);
}

} // namespace lpc
