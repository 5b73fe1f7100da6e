#pragma once

#include <memory>
#include <span>

namespace binx {

// A black-box predictor over real feature vectors. Implementations must be
// deterministic and side-effect free: predict() may be called from any number
// of threads concurrently.
class Model {
 public:
  virtual ~Model() = default;
  virtual int arity() const = 0;
  virtual double predict(std::span<const double> x) const = 0;
};

using ModelPtr = std::shared_ptr<const Model>;

}  // namespace binx
