#include "maxlin/model.h"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace maxlin {

namespace {

void CheckDim(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (got " +
                                std::to_string(got) + ", expected " +
                                std::to_string(want) + ")");
  }
}

template <typename F>
double MeanOverResiduals(const ParamBlocks& beta, const Dataset& data, F&& f) {
  CheckDim(data.p(), beta.p(), "objective");
  CheckDim(data.y.size(), data.n(), "objective");
  if (data.n() == 0) throw std::invalid_argument("objective: empty dataset");
  double s = 0.0;
  for (std::size_t i = 0; i < data.n(); ++i) {
    s += f(EvalMaxLinear(data.X.row(i), beta).value - data.y[i]);
  }
  return s / static_cast<double>(data.n());
}

}  // namespace

ParamBlocks::ParamBlocks(std::size_t k, std::size_t p)
    : k_(k), p_(p), flat_(k * p, 0.0) {
  if (k == 0 || p == 0) throw std::invalid_argument("ParamBlocks: k and p must be >= 1");
}

ParamBlocks::ParamBlocks(std::size_t k, std::size_t p, std::vector<double> flat)
    : k_(k), p_(p), flat_(std::move(flat)) {
  if (k == 0 || p == 0) throw std::invalid_argument("ParamBlocks: k and p must be >= 1");
  CheckDim(flat_.size(), k * p, "ParamBlocks");
  for (double v : flat_) {
    if (!std::isfinite(v)) throw std::invalid_argument("ParamBlocks: non-finite entry");
  }
}

ParamBlocks ParamBlocks::FromBlocks(const std::vector<std::vector<double>>& blocks) {
  if (blocks.empty()) throw std::invalid_argument("ParamBlocks: no blocks");
  const std::size_t p = blocks.front().size();
  std::vector<double> flat;
  flat.reserve(blocks.size() * p);
  for (const auto& b : blocks) {
    CheckDim(b.size(), p, "ParamBlocks::FromBlocks");
    flat.insert(flat.end(), b.begin(), b.end());
  }
  return ParamBlocks(blocks.size(), p, std::move(flat));
}

void Dataset::Validate() const {
  CheckDim(y.size(), X.rows(), "Dataset y");
  if (w) CheckDim(w->size(), X.rows(), "Dataset w");
  for (double v : X.data())
    if (!std::isfinite(v)) throw std::invalid_argument("Dataset: non-finite regressor");
  for (double v : y)
    if (!std::isfinite(v)) throw std::invalid_argument("Dataset: non-finite observation");
  if (w)
    for (double v : *w)
      if (!std::isfinite(v)) throw std::invalid_argument("Dataset: non-finite noise");
}

MaxLinearValue EvalMaxLinear(std::span<const double> x, const ParamBlocks& beta) {
  CheckDim(x.size(), beta.p(), "EvalMaxLinear");
  MaxLinearValue best{Dot(x, beta.block(0)), 0};
  for (std::size_t j = 1; j < beta.k(); ++j) {
    const double v = Dot(x, beta.block(j));
    if (v > best.value) best = {v, j};
  }
  return best;
}

std::vector<double> Subgradient(std::span<const double> x, const ParamBlocks& beta) {
  const std::size_t j = EvalMaxLinear(x, beta).argmax;
  std::vector<double> g(beta.size(), 0.0);
  std::copy(x.begin(), x.end(), g.begin() + static_cast<std::ptrdiff_t>(j * beta.p()));
  return g;
}

std::size_t ConeIndex(std::span<const double> x, const ParamBlocks& beta) {
  return EvalMaxLinear(x, beta).argmax;
}

double Norm12(const ParamBlocks& z) {
  double s = 0.0;
  for (std::size_t j = 0; j < z.k(); ++j) s += Norm2(z.block(j));
  return s;
}

double LadObjective(const ParamBlocks& beta, const Dataset& data) {
  return MeanOverResiduals(beta, data, [](double r) { return std::abs(r); });
}

double PositiveResidualObjective(const ParamBlocks& beta, const Dataset& data) {
  return MeanOverResiduals(beta, data, [](double r) { return r > 0.0 ? r : 0.0; });
}

ParamBlocks Difference(const ParamBlocks& a, const ParamBlocks& b) {
  CheckDim(a.k(), b.k(), "Difference k");
  CheckDim(a.p(), b.p(), "Difference p");
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = a.flat()[i] - b.flat()[i];
  return ParamBlocks(a.k(), a.p(), std::move(d));
}

double NormalizedError(const ParamBlocks& beta_hat, const ParamBlocks& beta_star) {
  const double denom = Norm12(beta_star);
  if (denom == 0.0) {
    throw std::invalid_argument("NormalizedError: ground truth has zero norm");
  }
  return Norm12(Difference(beta_hat, beta_star)) / denom;
}

}  // namespace maxlin
