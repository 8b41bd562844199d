// antispoof/eval.h

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

#ifndef ANTISPOOF_EVAL_H_
#define ANTISPOOF_EVAL_H_

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "antispoof/common.h"

namespace antispoof {

enum class Label { kHuman, kSpoof };
enum class Partition { kTrain, kDev, kEval };

/// Attack types are 1..10 for S1..S10; 0 means none (human speech).
inline constexpr int kNoAttack = 0;
inline constexpr int kMaxAttack = 10;

std::string attack_name(int attack);
std::string partition_name(Partition p);

/// One line of the protocol file:
///   utt_id <TAB> path <TAB> human|spoof <TAB> S1..S10|- <TAB> train|dev|eval
struct ManifestEntry {
  std::string utt_id;
  std::string path;
  Label label = Label::kHuman;
  int attack = kNoAttack;
  Partition partition = Partition::kTrain;
};

/// '#' lines and blank lines are skipped. Errors carry the line number.
std::vector<ManifestEntry> parse_manifest(std::istream &is,
                                          const std::string &source = "manifest");
std::vector<ManifestEntry> parse_manifest(const std::string &path);

void write_manifest(const std::string &path, const std::vector<ManifestEntry> &entries);

struct Score {
  std::string utt_id;
  double value = 0.0;
};

/// "utt_id<TAB>score" lines, score with 6 fraction digits, sorted by utt_id.
void write_scores(std::ostream &os, std::vector<Score> scores);
void write_scores(const std::string &path, std::vector<Score> scores);
std::vector<Score> read_scores(const std::string &path);

struct EerResult {
  double eer_overall = 0.0;            // percent
  std::map<int, double> eer_by_attack; // attack -> percent
  double threshold_at_eer = 0.0;
};

/// EER in percent, higher scores meaning genuine. Thresholds are swept over
/// -inf, the midpoints of consecutive distinct scores and +inf; the EER is
/// read at the first sweep point where FAR - FRR reaches zero or, when it
/// jumps over zero, linearly interpolated between the two sweep points that
/// bracket the sign change.
EerResult compute_eer(std::span<const double> genuine, std::span<const double> spoof);

/// Overall EER against all spoof trials plus one EER per attack type, each
/// against the full genuine pool. Attacks with no trials are omitted.
EerResult eer_by_attack(const std::vector<Score> &scores,
                        const std::vector<ManifestEntry> &manifest);

/// Fisher LDA directions, orthonormalized.
struct LdaModel {
  VectorXd mean;   // D
  MatrixXd basis;  // D x k
  int requested_k = 0;
};

struct LdaProjection {
  MatrixXd basis;                   // D x k
  RowMatrixXd projected;            // N x k
  std::vector<std::string> classes; // per row
};

/// Solves S_b v = lambda (S_w + ridge I) v with ridge = 1e-6 trace(S_w) / D.
/// k is clamped to #classes - 1.
LdaModel lda_fit(const Eigen::Ref<const RowMatrixXd> &x,
                 const std::vector<std::string> &classes, int k);
RowMatrixXd lda_project(const LdaModel &m, const Eigen::Ref<const RowMatrixXd> &x);
LdaProjection lda_fit_project(const Eigen::Ref<const RowMatrixXd> &x,
                              const std::vector<std::string> &classes, int k = 3);

/// Table laid out like the per-attack EER tables: one row per system,
/// columns for the attacks present in any row, then All.
std::string format_eer_report(
    const std::vector<std::pair<std::string, EerResult>> &rows);
/// Tab-separated copy of the same table plus the EER threshold.
std::string format_eer_tsv(const std::vector<std::pair<std::string, EerResult>> &rows);

}  // namespace antispoof

#endif  // ANTISPOOF_EVAL_H_
