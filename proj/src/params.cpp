#include "tfec/params.hpp"

#include <functional>
#include <numeric>

namespace tfec {

ParamSlice ParamStore::add(std::string name, std::vector<std::size_t> shape) {
  ParamSlice s;
  s.name = std::move(name);
  s.size = std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
  s.shape = std::move(shape);
  s.offset = values_.size();
  values_.resize(values_.size() + s.size, 0.0);
  slices_.push_back(s);
  return s;
}

const ParamSlice* ParamStore::find(const std::string& name) const {
  for (const auto& s : slices_) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

}  // namespace tfec
