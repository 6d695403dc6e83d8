#pragma once

#include <memory>
#include <set>
#include <string>
#include <vector>

namespace gerbelab {

using Simplex = std::vector<int>;

// Finite cover as an abstract nerve over the global chart R^n.
class Cover {
 public:
  int dim() const { return dim_; }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::set<Simplex>& nerve() const { return nerve_; }
  int size() const { return static_cast<int>(labels_.size()); }

  bool contains(const Simplex& s) const { return nerve_.count(s) > 0; }
  // all simplices with k+1 vertices, in canonical order
  std::vector<Simplex> simplices(int k) const;
  int index_of(const std::string& label) const;
  std::vector<std::string> names(const Simplex& s) const;

  friend bool operator==(const Cover& a, const Cover& b) {
    return a.dim_ == b.dim_ && a.labels_ == b.labels_ && a.nerve_ == b.nerve_;
  }

 private:
  friend std::shared_ptr<const Cover> build_cover(int, std::vector<std::string>,
                                                  const std::vector<std::vector<std::string>>&);
  int dim_ = 0;
  std::vector<std::string> labels_;
  std::set<Simplex> nerve_;
};

using CoverPtr = std::shared_ptr<const Cover>;

// Singletons are added implicitly; every other face must be listed.
CoverPtr build_cover(int dim, std::vector<std::string> labels, const std::vector<std::vector<std::string>>& nerve);
CoverPtr single_patch_cover(int dim, const std::string& label = "M");

bool same_cover(const CoverPtr& a, const CoverPtr& b);

}  // namespace gerbelab
