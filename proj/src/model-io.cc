// antispoof/model-io.cc

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

#include "antispoof/model-io.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <regex>
#include <set>

namespace antispoof {

namespace {

template <typename T>
void PutLe(std::string *out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i)
    out->push_back(static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xff));
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <typename T>
  T Le() {
    Need(sizeof(T));
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i]))
           << (8 * i);
    pos_ += sizeof(T);
    return static_cast<T>(v);
  }
  std::string_view Take(std::size_t n) {
    Need(n);
    std::string_view s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  void Need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw Error("model container is truncated");
  }
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

void ModelContainer::put(const std::string &name, const Eigen::Ref<const MatrixXd> &m) {
  Tensor t;
  t.dims = {static_cast<std::uint64_t>(m.rows()), static_cast<std::uint64_t>(m.cols())};
  t.data.resize(static_cast<std::size_t>(m.size()));
  Eigen::Map<RowMatrixXd>(t.data.data(), m.rows(), m.cols()) = m;
  sections_[name] = std::move(t);
}

void ModelContainer::put_vector(const std::string &name, const Eigen::Ref<const VectorXd> &v) {
  Tensor t;
  t.dims = {static_cast<std::uint64_t>(v.size())};
  t.data.assign(v.data(), v.data() + v.size());
  sections_[name] = std::move(t);
}

void ModelContainer::put_scalar(const std::string &name, double v) {
  sections_[name] = Tensor{{}, {v}};
}

const ModelContainer::Tensor &ModelContainer::Get(const std::string &name) const {
  auto it = sections_.find(name);
  if (it == sections_.end()) throw Error("model container lacks section '" + name + "'");
  return it->second;
}

MatrixXd ModelContainer::matrix(const std::string &name) const {
  const Tensor &t = Get(name);
  if (t.dims.size() != 2) throw Error("section '" + name + "' is not a matrix");
  return Eigen::Map<const RowMatrixXd>(t.data.data(), Eigen::Index(t.dims[0]),
                                       Eigen::Index(t.dims[1]));
}

VectorXd ModelContainer::vector(const std::string &name) const {
  const Tensor &t = Get(name);
  if (t.dims.size() != 1) throw Error("section '" + name + "' is not a vector");
  return Eigen::Map<const VectorXd>(t.data.data(), Eigen::Index(t.dims[0]));
}

double ModelContainer::scalar(const std::string &name) const {
  const Tensor &t = Get(name);
  if (!t.dims.empty() || t.data.size() != 1)
    throw Error("section '" + name + "' is not a scalar");
  return t.data[0];
}

std::string ModelContainer::Serialize() const {
  std::string out = "SPGD";
  PutLe<std::uint32_t>(&out, kVersion);
  PutLe<std::uint32_t>(&out, static_cast<std::uint32_t>(sections_.size()));
  for (const auto &[name, t] : sections_) {
    PutLe<std::uint32_t>(&out, static_cast<std::uint32_t>(name.size()));
    out += name;
    PutLe<std::uint8_t>(&out, kFloat64);
    PutLe<std::uint32_t>(&out, static_cast<std::uint32_t>(t.dims.size()));
    for (std::uint64_t d : t.dims) PutLe<std::uint64_t>(&out, d);
    for (double v : t.data) PutLe<std::uint64_t>(&out, std::bit_cast<std::uint64_t>(v));
  }
  return out;
}

ModelContainer ModelContainer::Deserialize(std::string_view bytes, const NameFilter &known) {
  Reader r(bytes);
  if (r.Take(4) != "SPGD") throw Error("not a model container (bad magic)");
  std::uint32_t version = r.Le<std::uint32_t>();
  if (version != kVersion)
    throw Error("unsupported model container version " + std::to_string(version));
  std::uint32_t count = r.Le<std::uint32_t>();
  ModelContainer c;
  for (std::uint32_t s = 0; s < count; ++s) {
    std::uint32_t name_len = r.Le<std::uint32_t>();
    std::string name(r.Take(name_len));
    if (!known(name)) throw Error("unknown model section '" + name + "'");
    if (r.Le<std::uint8_t>() != kFloat64)
      throw Error("section '" + name + "' has an unsupported dtype");
    std::uint32_t rank = r.Le<std::uint32_t>();
    Tensor t;
    std::uint64_t total = 1;
    for (std::uint32_t k = 0; k < rank; ++k) {
      t.dims.push_back(r.Le<std::uint64_t>());
      total *= t.dims.back();
    }
    if (total > bytes.size() / 8) throw Error("model container is truncated");
    t.data.resize(static_cast<std::size_t>(total));
    for (double &v : t.data) v = std::bit_cast<double>(r.Le<std::uint64_t>());
    if (!c.sections_.emplace(name, std::move(t)).second)
      throw Error("duplicate model section '" + name + "'");
  }
  if (!r.done()) throw Error("trailing bytes after model container sections");
  return c;
}

void ModelContainer::Write(const std::string &path) const {
  std::string bytes = Serialize();
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write model file " + path);
  os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw Error("write failed on " + path);
}

ModelContainer ModelContainer::Read(const std::string &path, const NameFilter &known) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open model file " + path);
  std::string bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  try {
    return Deserialize(bytes, known);
  } catch (const Error &e) {
    throw Error(path + ": " + e.what());
  }
}

ModelContainer::NameFilter AllowNames(std::vector<std::string> names) {
  std::set<std::string> allowed(names.begin(), names.end());
  return [allowed = std::move(allowed)](std::string_view n) {
    return allowed.count(std::string(n)) != 0;
  };
}

namespace {

const char *PcaPrefix(FeatureType t) {
  switch (t) {
    case FeatureType::kMfpc: return "pca_mfpc";
    case FeatureType::kCosPhasePc: return "pca_cosphase";
    case FeatureType::kMwpc: return "pca_mwpc";
    case FeatureType::kMfcc: break;
  }
  return nullptr;
}

constexpr FeatureType kPcaTypes[] = {FeatureType::kMfpc, FeatureType::kCosPhasePc,
                                     FeatureType::kMwpc};

}  // namespace

void save_front_end(const std::string &path, const FrontEndModels &m) {
  ModelContainer c;
  for (FeatureType t : kPcaTypes) {
    const PcaModel *pca = m.pca_for(t);
    if (pca->empty()) continue;
    std::string p = PcaPrefix(t);
    c.put_vector(p + ".mean", pca->mean);
    c.put(p + ".basis", pca->basis);
    c.put_vector(p + ".eigenvalues", pca->eigenvalues);
  }
  c.Write(path);
}

FrontEndModels load_front_end(const std::string &path) {
  std::vector<std::string> names;
  for (FeatureType t : kPcaTypes)
    for (const char *field : {".mean", ".basis", ".eigenvalues"})
      names.push_back(std::string(PcaPrefix(t)) + field);
  ModelContainer c = ModelContainer::Read(path, AllowNames(names));
  FrontEndModels m = FrontEndModels::Default();
  for (FeatureType t : kPcaTypes) {
    std::string p = PcaPrefix(t);
    if (!c.has(p + ".basis")) continue;
    PcaModel *pca = m.pca_for(t);
    pca->mean = c.vector(p + ".mean");
    pca->basis = c.matrix(p + ".basis");
    pca->eigenvalues = c.vector(p + ".eigenvalues");
    if (pca->basis.rows() != pca->mean.size() ||
        pca->basis.cols() != pca->eigenvalues.size())
      throw Error(path + ": inconsistent PCA model " + p);
  }
  return m;
}

void save_gmm(const std::string &path, const DiagonalGmm &g) {
  ModelContainer c;
  c.put_vector("weights", g.weights);
  c.put("means", g.means);
  c.put("variances", g.variances);
  c.Write(path);
}

DiagonalGmm load_gmm(const std::string &path) {
  ModelContainer c = ModelContainer::Read(path, AllowNames({"weights", "means", "variances"}));
  DiagonalGmm g{c.vector("weights"), c.matrix("means"), c.matrix("variances")};
  CheckGmm(g);
  return g;
}

void save_tv(const std::string &path, const TvModel &tv) {
  ModelContainer c;
  c.put("t_matrix", tv.t_matrix);
  c.Write(path);
}

TvModel load_tv(const std::string &path, const DiagonalGmm &ubm) {
  ModelContainer c = ModelContainer::Read(path, AllowNames({"t_matrix"}));
  TvModel tv{c.matrix("t_matrix"), ubm};
  if (tv.t_matrix.rows() != ubm.num_components() * ubm.dim())
    throw Error(path + ": T matrix does not match the UBM");
  return tv;
}

void save_svm(const std::string &path, const LinearSvmModel &m) {
  ModelContainer c;
  c.put_vector("svm.weights", m.weights);
  c.put_scalar("svm.bias", m.bias);
  c.put_scalar("svm.c_param", m.c_param);
  c.Write(path);
}

LinearSvmModel load_svm(const std::string &path) {
  ModelContainer c =
      ModelContainer::Read(path, AllowNames({"svm.weights", "svm.bias", "svm.c_param"}));
  LinearSvmModel m{c.vector("svm.weights"), c.scalar("svm.bias"), c.scalar("svm.c_param")};
  if (!m.weights.allFinite()) throw Error(path + ": non-finite SVM weights");
  return m;
}

void save_dbn(const std::string &path, const DbnModel &m) {
  ModelContainer c;
  for (std::size_t k = 0; k < m.hidden.size(); ++k) {
    std::string p = "dbn.hidden" + std::to_string(k);
    c.put(p + ".weights", m.hidden[k].weights);
    c.put_vector(p + ".bias", m.hidden[k].bias);
  }
  c.put("dbn.head.weights", m.head.weights);
  c.put_vector("dbn.head.bias", m.head.bias);
  c.Write(path);
}

DbnModel load_dbn(const std::string &path) {
  static const std::regex kName(R"(dbn\.(hidden\d+|head)\.(weights|bias))");
  ModelContainer c = ModelContainer::Read(path, [](std::string_view n) {
    return std::regex_match(n.begin(), n.end(), kName);
  });
  DbnModel m;
  for (std::size_t k = 0;; ++k) {
    std::string p = "dbn.hidden" + std::to_string(k);
    if (!c.has(p + ".weights")) break;
    m.hidden.push_back({c.matrix(p + ".weights"), c.vector(p + ".bias")});
  }
  m.head = {c.matrix("dbn.head.weights"), c.vector("dbn.head.bias")};
  std::size_t expected = 2 * m.hidden.size() + 2;
  if (c.sections().size() != expected)
    throw Error(path + ": DBN hidden layers are not numbered contiguously");
  CheckDbn(m);
  return m;
}

}  // namespace antispoof
