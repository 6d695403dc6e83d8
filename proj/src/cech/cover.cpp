#include "gerbelab/cech/cover.hpp"

#include <algorithm>
#include <functional>

#include "gerbelab/error.hpp"

namespace gerbelab {

std::vector<Simplex> Cover::simplices(int k) const {
  std::vector<Simplex> out;
  for (const auto& s : nerve_)
    if (static_cast<int>(s.size()) == k + 1) out.push_back(s);
  return out;
}

int Cover::index_of(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw Error(ErrorCode::BadReference, "unknown patch label '" + label + "'");
  return static_cast<int>(it - labels_.begin());
}

std::vector<std::string> Cover::names(const Simplex& s) const {
  std::vector<std::string> out;
  for (int i : s) out.push_back(labels_.at(i));
  return out;
}

CoverPtr build_cover(int dim, std::vector<std::string> labels, const std::vector<std::vector<std::string>>& nerve) {
  if (dim < 1) throw Error(ErrorCode::InvalidArgument, "cover dimension must be positive");
  if (labels.empty()) throw Error(ErrorCode::InvalidNerve, "no patches");
  {
    auto sorted = labels;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw Error(ErrorCode::InvalidNerve, "duplicate patch label");
  }
  auto cover = std::make_shared<Cover>();
  cover->dim_ = dim;
  cover->labels_ = std::move(labels);
  for (int i = 0; i < cover->size(); ++i) cover->nerve_.insert({i});
  for (const auto& tuple : nerve) {
    Simplex s;
    for (const auto& l : tuple) s.push_back(cover->index_of(l));
    std::sort(s.begin(), s.end());
    if (s.empty() || std::adjacent_find(s.begin(), s.end()) != s.end())
      throw Error(ErrorCode::InvalidNerve, "degenerate simplex in nerve");
    cover->nerve_.insert(s);
  }
  for (const auto& s : cover->nerve_) {
    if (s.size() < 2) continue;
    for (size_t j = 0; j < s.size(); ++j) {
      Simplex f = s;
      f.erase(f.begin() + static_cast<long>(j));
      if (!cover->contains(f)) {
        std::string msg = "missing face {";
        for (size_t m = 0; m < f.size(); ++m) msg += (m ? "," : "") + cover->labels_[f[m]];
        throw Error(ErrorCode::InvalidNerve, msg + "}");
      }
    }
  }
  // patches of a cover of the connected chart R^n have a connected nerve
  std::vector<int> parent(cover->size());
  for (int i = 0; i < cover->size(); ++i) parent[i] = i;
  std::function<int(int)> find = [&](int i) { return parent[i] == i ? i : parent[i] = find(parent[i]); };
  for (const auto& s : cover->simplices(1)) parent[find(s[0])] = find(s[1]);
  for (int i = 1; i < cover->size(); ++i)
    if (find(i) != find(0)) throw Error(ErrorCode::InvalidNerve, "nerve is disconnected");
  return cover;
}

CoverPtr single_patch_cover(int dim, const std::string& label) { return build_cover(dim, {label}, {}); }

bool same_cover(const CoverPtr& a, const CoverPtr& b) { return a == b || (a && b && *a == *b); }

}  // namespace gerbelab
