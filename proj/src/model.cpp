#include "stelab/model.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>

#include "stelab/errors.hpp"

namespace stelab {

std::vector<double> sample_teacher(std::size_t d, const TeacherSpec& spec, uint64_t seed) {
  if (!(spec.rho > 0.0)) throw ConfigError("teacher: rho must be > 0");
  std::vector<double> w(d);
  const double r = std::sqrt(spec.rho);
  Rng rng(seed);
  switch (spec.dist) {
    case TeacherDist::Ones:
      for (auto& v : w) v = r;
      break;
    case TeacherDist::Rademacher:
      for (auto& v : w) v = (rng.next_u64() >> 63) ? r : -r;
      break;
    case TeacherDist::Gaussian:
      for (auto& v : w) v = r * rng.next_normal();
      break;
  }
  return w;
}

double predict(const std::vector<double>& w, const std::vector<double>& x,
               const Quantizer& quant_w, const Quantizer& quant_x) {
  if (w.size() != x.size()) throw ConfigError("predict: dimension mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i)
    acc += quant_w.apply(w[i]) * quant_x.apply(x[i]);
  return acc / std::sqrt(static_cast<double>(w.size()));
}

double generalization_error(double kappa_x, double sigma_sq_x, double m_psi, double q_psi,
                            double rho, double noise_var) {
  return sigma_sq_x * q_psi - 2.0 * kappa_x * m_psi + rho + noise_var;
}

std::array<double, 16> local_field_covariance(double kappa_x, double sigma_sq_x, double rho,
                                              double m, double q, double m_psi,
                                              double r_psi, double q_psi) {
  const double k = kappa_x, s2 = sigma_sq_x;
  return {rho,      k * rho,      k * m,       k * m_psi,   //
          k * rho,  s2 * rho,     s2 * m,      s2 * m_psi,  //
          k * m,    s2 * m,       s2 * q,      s2 * r_psi,  //
          k * m_psi, s2 * m_psi,  s2 * r_psi,  s2 * q_psi};
}

// ---- record / replay ----

namespace {
constexpr char kMagic[4] = {'S', 'T', 'E', 'L'};
constexpr uint32_t kVersion = 1;
}  // namespace

struct RecordWriter::Impl {
  std::FILE* f = nullptr;
  std::size_t d = 0;
};

RecordWriter::RecordWriter(const std::string& path, std::size_t d, uint64_t seed)
    : impl_(new Impl) {
  impl_->f = std::fopen(path.c_str(), "wb");
  if (!impl_->f) {
    delete impl_;
    throw ConfigError("record: cannot open " + path);
  }
  impl_->d = d;
  const uint64_t d64 = d;
  std::fwrite(kMagic, 1, 4, impl_->f);
  std::fwrite(&kVersion, sizeof kVersion, 1, impl_->f);
  std::fwrite(&d64, sizeof d64, 1, impl_->f);
  std::fwrite(&seed, sizeof seed, 1, impl_->f);
}

RecordWriter::~RecordWriter() {
  if (impl_->f) std::fclose(impl_->f);
  delete impl_;
}

void RecordWriter::append(const double* x, double y) {
  std::fwrite(x, sizeof(double), impl_->d, impl_->f);
  std::fwrite(&y, sizeof(double), 1, impl_->f);
}

struct RecordReader::Impl {
  std::FILE* f = nullptr;
  std::size_t d = 0;
  uint64_t seed = 0;
};

RecordReader::RecordReader(const std::string& path) : impl_(new Impl) {
  impl_->f = std::fopen(path.c_str(), "rb");
  if (!impl_->f) {
    delete impl_;
    throw ConfigError("record: cannot open " + path);
  }
  char magic[4];
  uint32_t version = 0;
  uint64_t d64 = 0;
  bool ok = std::fread(magic, 1, 4, impl_->f) == 4 &&
            std::fread(&version, sizeof version, 1, impl_->f) == 1 &&
            std::fread(&d64, sizeof d64, 1, impl_->f) == 1 &&
            std::fread(&impl_->seed, sizeof impl_->seed, 1, impl_->f) == 1;
  if (!ok || std::memcmp(magic, kMagic, 4) != 0 || version != kVersion) {
    std::fclose(impl_->f);
    delete impl_;
    throw ConfigError("record: bad header in " + path);
  }
  impl_->d = static_cast<std::size_t>(d64);
}

RecordReader::~RecordReader() {
  if (impl_->f) std::fclose(impl_->f);
  delete impl_;
}

std::size_t RecordReader::dim() const { return impl_->d; }
uint64_t RecordReader::seed() const { return impl_->seed; }

bool RecordReader::next(double* x, double& y) {
  if (std::fread(x, sizeof(double), impl_->d, impl_->f) != impl_->d) return false;
  return std::fread(&y, sizeof(double), 1, impl_->f) == 1;
}

}  // namespace stelab
