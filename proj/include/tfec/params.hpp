#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace tfec {

/// A named, shaped window into a ParamStore's flat value vector.
struct ParamSlice {
  std::string name;
  std::vector<std::size_t> shape;
  std::size_t offset = 0;
  std::size_t size = 0;
};

/// All learnable weights of a model in one flat vector, so the optimizer,
/// gradient checks and checkpoints can treat them uniformly.
class ParamStore {
 public:
  ParamSlice add(std::string name, std::vector<std::size_t> shape);

  std::span<double> view(const ParamSlice& s) { return {values_.data() + s.offset, s.size}; }
  std::span<const double> view(const ParamSlice& s) const { return {values_.data() + s.offset, s.size}; }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }
  const std::vector<ParamSlice>& slices() const { return slices_; }
  std::size_t size() const { return values_.size(); }

  const ParamSlice* find(const std::string& name) const;

 private:
  std::vector<double> values_;
  std::vector<ParamSlice> slices_;
};

inline std::span<double> slice_of(std::vector<double>& flat, const ParamSlice& s) {
  return {flat.data() + s.offset, s.size};
}
inline std::span<const double> slice_of(const std::vector<double>& flat, const ParamSlice& s) {
  return {flat.data() + s.offset, s.size};
}

}  // namespace tfec
