// antispoof/model-io.h

// Copyright 2026  The antispoof authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef ANTISPOOF_MODEL_IO_H_
#define ANTISPOOF_MODEL_IO_H_

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "antispoof/dbn.h"
#include "antispoof/features.h"
#include "antispoof/ivector.h"
#include "antispoof/svm.h"

namespace antispoof {

/// Named float64 tensors in a little-endian binary file:
///
///   "SPGD" | u32 version | u32 section count | sections...
///   section: u32 name length | name | u8 dtype (1 = float64) |
///            u32 rank | u64 dims[rank] | row-major float64 payload
///
/// Sections are stored sorted by name, so equal contents give equal bytes.
class ModelContainer {
 public:
  static constexpr std::uint32_t kVersion = 1;
  static constexpr std::uint8_t kFloat64 = 1;

  struct Tensor {
    std::vector<std::uint64_t> dims;
    std::vector<double> data;  // row-major
  };

  /// Decides which section names a reader accepts.
  using NameFilter = std::function<bool(std::string_view)>;

  void put(const std::string &name, const Eigen::Ref<const MatrixXd> &m);
  void put_vector(const std::string &name, const Eigen::Ref<const VectorXd> &v);
  void put_scalar(const std::string &name, double v);

  bool has(const std::string &name) const { return sections_.count(name) != 0; }
  MatrixXd matrix(const std::string &name) const;
  VectorXd vector(const std::string &name) const;
  double scalar(const std::string &name) const;
  const std::map<std::string, Tensor> &sections() const { return sections_; }

  std::string Serialize() const;
  /// Throws on a bad magic/version/dtype, on truncation, and on any section
  /// name `known` rejects (the name is reported).
  static ModelContainer Deserialize(std::string_view bytes, const NameFilter &known);

  void Write(const std::string &path) const;
  static ModelContainer Read(const std::string &path, const NameFilter &known);

 private:
  const Tensor &Get(const std::string &name) const;

  std::map<std::string, Tensor> sections_;
};

/// Accepts exactly the listed names.
ModelContainer::NameFilter AllowNames(std::vector<std::string> names);

// Typed model files. Each loader rejects sections its model does not use.

void save_front_end(const std::string &path, const FrontEndModels &m);
FrontEndModels load_front_end(const std::string &path);

void save_gmm(const std::string &path, const DiagonalGmm &g);
DiagonalGmm load_gmm(const std::string &path);

/// Stores T only; the UBM lives in its own file.
void save_tv(const std::string &path, const TvModel &tv);
TvModel load_tv(const std::string &path, const DiagonalGmm &ubm);

void save_svm(const std::string &path, const LinearSvmModel &m);
LinearSvmModel load_svm(const std::string &path);

void save_dbn(const std::string &path, const DbnModel &m);
DbnModel load_dbn(const std::string &path);

}  // namespace antispoof

#endif  // ANTISPOOF_MODEL_IO_H_
