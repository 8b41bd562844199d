// antispoof/eval.cc

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

#include "antispoof/eval.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace antispoof {

std::string attack_name(int attack) {
  return attack == kNoAttack ? "-" : "S" + std::to_string(attack);
}

std::string partition_name(Partition p) {
  switch (p) {
    case Partition::kTrain: return "train";
    case Partition::kDev: return "dev";
    case Partition::kEval: return "eval";
  }
  return "?";
}

namespace {

std::vector<std::string> SplitTabs(const std::string &line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    std::size_t tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return fields;
}

int ParseAttack(const std::string &s) {
  if (s == "-" || s == "none") return kNoAttack;
  if (s.size() >= 2 && s[0] == 'S') {
    try {
      std::size_t used = 0;
      int v = std::stoi(s.substr(1), &used);
      if (used == s.size() - 1 && v >= 1 && v <= kMaxAttack) return v;
    } catch (const std::exception &) {
    }
  }
  return -1;
}

}  // namespace

std::vector<ManifestEntry> parse_manifest(std::istream &is, const std::string &source) {
  std::vector<ManifestEntry> entries;
  std::unordered_set<std::string> seen;
  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string &why) {
    throw Error(source + ":" + std::to_string(line_no) + ": " + why);
  };
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> f = SplitTabs(line);
    if (f.size() != 5)
      fail("expected 5 tab-separated fields, got " + std::to_string(f.size()));
    ManifestEntry e;
    e.utt_id = f[0];
    e.path = f[1];
    if (e.utt_id.empty() || e.path.empty()) fail("empty utterance id or path");
    if (f[2] == "human") e.label = Label::kHuman;
    else if (f[2] == "spoof") e.label = Label::kSpoof;
    else fail("label must be human or spoof, got '" + f[2] + "'");
    e.attack = ParseAttack(f[3]);
    if (e.attack < 0) fail("attack must be S1..S10 or -, got '" + f[3] + "'");
    if (e.label == Label::kHuman && e.attack != kNoAttack)
      fail("human utterance " + e.utt_id + " carries attack " + f[3]);
    if (e.label == Label::kSpoof && e.attack == kNoAttack)
      fail("spoof utterance " + e.utt_id + " has no attack type");
    if (f[4] == "train") e.partition = Partition::kTrain;
    else if (f[4] == "dev") e.partition = Partition::kDev;
    else if (f[4] == "eval") e.partition = Partition::kEval;
    else fail("partition must be train, dev or eval, got '" + f[4] + "'");
    if (!seen.insert(e.utt_id).second) fail("duplicate utterance id " + e.utt_id);
    entries.push_back(std::move(e));
  }
  return entries;
}

std::vector<ManifestEntry> parse_manifest(const std::string &path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open manifest " + path);
  return parse_manifest(is, path);
}

void write_manifest(const std::string &path, const std::vector<ManifestEntry> &entries) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write manifest " + path);
  os << "# utt_id\tpath\tlabel\tattack\tpartition\n";
  for (const ManifestEntry &e : entries)
    os << e.utt_id << '\t' << e.path << '\t'
       << (e.label == Label::kHuman ? "human" : "spoof") << '\t'
       << attack_name(e.attack) << '\t' << partition_name(e.partition) << '\n';
}

void write_scores(std::ostream &os, std::vector<Score> scores) {
  std::sort(scores.begin(), scores.end(),
            [](const Score &a, const Score &b) { return a.utt_id < b.utt_id; });
  char buf[64];
  for (const Score &s : scores) {
    std::snprintf(buf, sizeof(buf), "%.6f", s.value);
    os << s.utt_id << '\t' << buf << '\n';
  }
}

void write_scores(const std::string &path, std::vector<Score> scores) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write score file " + path);
  write_scores(os, std::move(scores));
}

std::vector<Score> read_scores(const std::string &path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open score file " + path);
  std::vector<Score> scores;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> f = SplitTabs(line);
    char *end = nullptr;
    double v = f.size() == 2 ? std::strtod(f[1].c_str(), &end) : 0.0;
    if (f.size() != 2 || end == f[1].c_str() || *end != '\0')
      throw Error(path + ":" + std::to_string(line_no) +
                  ": expected 'utt_id<TAB>score'");
    scores.push_back({f[0], v});
  }
  return scores;
}

EerResult compute_eer(std::span<const double> genuine, std::span<const double> spoof) {
  if (genuine.empty() || spoof.empty())
    throw Error("EER needs at least one genuine and one spoof score");
  std::vector<double> g(genuine.begin(), genuine.end());
  std::vector<double> s(spoof.begin(), spoof.end());
  std::sort(g.begin(), g.end());
  std::sort(s.begin(), s.end());
  std::vector<double> distinct;
  distinct.reserve(g.size() + s.size());
  std::merge(g.begin(), g.end(), s.begin(), s.end(), std::back_inserter(distinct));
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  const double num_g = double(g.size()), num_s = double(s.size());
  const std::size_t m = distinct.size();
  // Sweep point i sits just above distinct[i - 1]: i = 0 is -inf, i = m is
  // +inf, and in between the midpoint of distinct[i - 1] and distinct[i].
  auto threshold = [&](std::size_t i) {
    if (i == 0) return -std::numeric_limits<double>::infinity();
    if (i == m) return std::numeric_limits<double>::infinity();
    return 0.5 * (distinct[i - 1] + distinct[i]);
  };
  std::size_t g_below = 0, s_below = 0;
  double prev_frr = 0.0, prev_far = 1.0;
  EerResult r;
  for (std::size_t i = 0; i <= m; ++i) {
    if (i > 0) {
      double v = distinct[i - 1];
      while (g_below < g.size() && g[g_below] <= v) ++g_below;
      while (s_below < s.size() && s[s_below] <= v) ++s_below;
    }
    double frr = g_below / num_g;
    double far = (num_s - s_below) / num_s;
    double diff = far - frr;
    if (diff == 0.0) {
      r.eer_overall = 100.0 * frr;
      r.threshold_at_eer = threshold(i);
      return r;
    }
    if (diff < 0.0) {
      double prev_diff = prev_far - prev_frr;
      double lambda = prev_diff / (prev_diff - diff);
      r.eer_overall = 100.0 * (prev_frr + lambda * (frr - prev_frr));
      r.threshold_at_eer = distinct[i - 1];
      return r;
    }
    prev_frr = frr;
    prev_far = far;
  }
  throw Error("EER sweep found no crossing");  // unreachable: diff(+inf) = -1
}

EerResult eer_by_attack(const std::vector<Score> &scores,
                        const std::vector<ManifestEntry> &manifest) {
  std::unordered_map<std::string, const ManifestEntry *> by_id;
  for (const ManifestEntry &e : manifest) by_id[e.utt_id] = &e;
  std::vector<double> genuine, spoof;
  std::map<int, std::vector<double>> per_attack;
  std::vector<std::string> unmatched;
  for (const Score &s : scores) {
    auto it = by_id.find(s.utt_id);
    if (it == by_id.end()) {
      unmatched.push_back(s.utt_id);
      continue;
    }
    if (it->second->label == Label::kHuman) {
      genuine.push_back(s.value);
    } else {
      spoof.push_back(s.value);
      per_attack[it->second->attack].push_back(s.value);
    }
  }
  if (!unmatched.empty()) {
    std::string msg = std::to_string(unmatched.size()) +
                      " scored utterance(s) missing from the manifest:";
    for (std::size_t i = 0; i < unmatched.size() && i < 20; ++i) msg += " " + unmatched[i];
    throw Error(msg);
  }
  EerResult r = compute_eer(genuine, spoof);
  for (const auto &[attack, pool] : per_attack)
    r.eer_by_attack[attack] = compute_eer(genuine, pool).eer_overall;
  return r;
}

LdaModel lda_fit(const Eigen::Ref<const RowMatrixXd> &x,
                 const std::vector<std::string> &classes, int k) {
  const Eigen::Index n = x.rows(), d = x.cols();
  if (static_cast<std::size_t>(n) != classes.size())
    throw Error("LDA: class label count does not match row count");
  std::map<std::string, std::vector<Eigen::Index>> groups;
  for (Eigen::Index i = 0; i < n; ++i) groups[classes[i]].push_back(i);
  const int num_classes = static_cast<int>(groups.size());
  if (k < 1) throw Error("LDA: k must be positive");
  if (k > d)
    throw Error("LDA: k = " + std::to_string(k) + " exceeds the input dimension " +
                std::to_string(d));
  LdaModel m;
  m.requested_k = k;
  if (k > num_classes - 1) {
    if (num_classes < 2) throw Error("LDA needs at least two classes");
    LogLine() << "LDA: k clamped from " << k << " to " << num_classes - 1
              << " (number of classes - 1)";
    k = num_classes - 1;
  }

  m.mean = x.colwise().mean().transpose();
  MatrixXd within = MatrixXd::Zero(d, d), between = MatrixXd::Zero(d, d);
  for (const auto &[name, rows] : groups) {
    VectorXd class_mean = VectorXd::Zero(d);
    for (Eigen::Index i : rows) class_mean += x.row(i).transpose();
    class_mean /= double(rows.size());
    for (Eigen::Index i : rows) {
      VectorXd c = x.row(i).transpose() - class_mean;
      within.noalias() += c * c.transpose();
    }
    VectorXd dm = class_mean - m.mean;
    between.noalias() += double(rows.size()) * dm * dm.transpose();
  }
  double trace = within.trace();
  if (!(trace > 0.0)) throw Error("LDA: within-class scatter is zero");
  within.diagonal().array() += 1e-6 * trace / double(d);

  Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> ges(between, within);
  if (ges.info() != Eigen::Success)
    throw Error("LDA: within-class scatter is singular beyond ridge repair");
  MatrixXd directions(d, k);
  for (int j = 0; j < k; ++j) directions.col(j) = ges.eigenvectors().col(d - 1 - j);

  Eigen::HouseholderQR<MatrixXd> qr(directions);
  m.basis = qr.householderQ() * MatrixXd::Identity(d, k);
  for (int j = 0; j < k; ++j)
    if (m.basis.col(j).dot(directions.col(j)) < 0) m.basis.col(j) *= -1.0;
  return m;
}

RowMatrixXd lda_project(const LdaModel &m, const Eigen::Ref<const RowMatrixXd> &x) {
  if (x.cols() != m.mean.size()) throw Error("LDA: input dimension mismatch");
  return (x.rowwise() - m.mean.transpose()) * m.basis;
}

LdaProjection lda_fit_project(const Eigen::Ref<const RowMatrixXd> &x,
                              const std::vector<std::string> &classes, int k) {
  LdaModel m = lda_fit(x, classes, k);
  return LdaProjection{m.basis, lda_project(m, x), classes};
}

namespace {

std::vector<int> ReportColumns(const std::vector<std::pair<std::string, EerResult>> &rows) {
  std::set<int> attacks;
  for (const auto &row : rows)
    for (const auto &kv : row.second.eer_by_attack) attacks.insert(kv.first);
  return {attacks.begin(), attacks.end()};
}

}  // namespace

std::string format_eer_report(const std::vector<std::pair<std::string, EerResult>> &rows) {
  std::vector<int> cols = ReportColumns(rows);
  std::size_t name_width = 6;
  for (const auto &row : rows) name_width = std::max(name_width, row.first.size());
  std::ostringstream os;
  os << "EER (%)\n" << std::left << std::setw(int(name_width)) << "System";
  for (int a : cols) os << std::right << std::setw(8) << attack_name(a);
  os << std::right << std::setw(8) << "All" << '\n';
  os << std::fixed << std::setprecision(2);
  for (const auto &[name, r] : rows) {
    os << std::left << std::setw(int(name_width)) << name << std::right;
    for (int a : cols) {
      auto it = r.eer_by_attack.find(a);
      if (it == r.eer_by_attack.end()) os << std::setw(8) << "-";
      else os << std::setw(8) << it->second;
    }
    os << std::setw(8) << r.eer_overall << '\n';
  }
  os << '\n';
  for (const auto &[name, r] : rows) os << name << " All: " << r.eer_overall << '\n';
  return os.str();
}

std::string format_eer_tsv(const std::vector<std::pair<std::string, EerResult>> &rows) {
  std::vector<int> cols = ReportColumns(rows);
  std::ostringstream os;
  os << "system";
  for (int a : cols) os << '\t' << attack_name(a);
  os << "\tAll\tthreshold\n";
  char buf[64];
  for (const auto &[name, r] : rows) {
    os << name;
    for (int a : cols) {
      auto it = r.eer_by_attack.find(a);
      if (it == r.eer_by_attack.end()) {
        os << "\t-";
      } else {
        std::snprintf(buf, sizeof(buf), "%.6f", it->second);
        os << '\t' << buf;
      }
    }
    std::snprintf(buf, sizeof(buf), "%.6f", r.eer_overall);
    os << '\t' << buf;
    std::snprintf(buf, sizeof(buf), "%.6f", r.threshold_at_eer);
    os << '\t' << buf << '\n';
  }
  return os.str();
}

}  // namespace antispoof
