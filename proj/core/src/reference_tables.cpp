#include "twostage/reference_tables.hpp"

#include <cmath>
#include <limits>

namespace twostage {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}  // namespace

const std::vector<ConvergenceReference>& table1_reference() {
  static const std::vector<ConvergenceReference> table = {
      {0, 2.7,
       {1.3291e+01, 3.6366e-01, 1.1691e-02, 5.5332e-04, 3.0414e-05, 1.7974e-06},
       {kNaN, 5.1917, 4.9591, 4.4011, 4.1853, 4.0807}},
      {0.5, 5.8,
       {3.9039e+01, 5.1269e+00, 1.5732e-01, 6.7895e-03, 3.6496e-04, 2.0228e-05},
       {kNaN, 2.9287, 5.0263, 4.5343, 4.2175, 4.1733}},
      {1, 3.2,
       {2.4742e+01, 1.7886e-01, 3.6257e-03, 8.0248e-05, 2.1109e-06, 6.0532e-08},
       {kNaN, 7.1120, 5.6244, 5.4976, 5.2486, 5.1240}},
  };
  return table;
}

const std::vector<SpringReference>& table2_reference() {
  static const std::vector<SpringReference> table = {
      {0.5, 2.785,
       {
           {2, 1437, 2.571e-14, 2.604e-14},
           {4, 2874, 1.938e-13, 1.938e-13},
           {6, 4311, 2.325e-13, 2.325e-13},
           {8, 5748, 6.518e-13, 6.518e-13},
           {10, 7185, 1.072e-12, 1.072e-12},
           {12, 8622, 1.492e-12, 1.492e-12},
           {14, 10059, 1.909e-12, 1.910e-12},
           {16, 11496, 2.327e-12, 2.327e-12},
       }},
      {1, 2.785,
       {
           {2, 1437, 5.746e-14, 5.746e-14},
           {4, 2874, 1.373e-13, 1.376e-13},
           {6, 4311, 3.114e-13, 3.113e-13},
           {8, 5748, 7.596e-13, 7.591e-13},
           {10, 7185, 1.209e-12, 1.209e-12},
           {12, 8622, 1.655e-12, 1.655e-12},
           {14, 10059, 2.105e-12, 2.105e-12},
           {16, 11496, 2.555e-12, 2.555e-12},
       }},
  };
  return table;
}

const std::vector<LorenzReference>& lorenz_reference() {
  static const std::vector<LorenzReference> table = {
      {MethodConfig::two_stage(0.0), 0.04,
       {{
           {6.7015e-02, 2.9769e-03, 9.9755e-02},
           {1.7809e-01, 2.0776e-01, 4.4027e-02},
           {1.8387e-02, 5.9763e-03, 6.1340e-02},
           {4.5944e-02, 3.8950e-02, 2.0328e-02},
           {2.5444e-02, 2.5753e-02, 1.3452e-03},
           {7.0759e-03, 8.7117e-03, 3.1256e-03},
           {6.7926e-04, 3.1301e-04, 2.2993e-03},
           {1.8880e-03, 1.5924e-03, 8.2682e-04},
           {1.0623e-03, 1.0787e-03, 5.1666e-05},
           {2.8804e-04, 3.5932e-04, 1.3760e-04},
       }}},
      {MethodConfig::two_stage(0.0), 0.01,
       {{
           {2.0257e-05, 1.7648e-05, 4.4321e-06},
           {3.0170e-06, 5.8543e-06, 7.1119e-06},
           {6.5192e-06, 4.9609e-06, 4.4250e-06},
           {6.0860e-06, 5.8296e-06, 1.0720e-06},
           {2.9386e-06, 3.2706e-06, 5.3503e-07},
           {4.1393e-07, 7.6983e-07, 7.7225e-07},
           {5.5782e-07, 3.8339e-07, 4.4008e-07},
           {5.3004e-07, 5.0065e-07, 1.1080e-07},
           {2.3573e-07, 2.6121e-07, 3.8009e-08},
           {3.0994e-08, 5.6925e-08, 5.6218e-08},
       }}},
      {MethodConfig::two_stage(0.5), 0.0625,
       {{
           {9.3319e-02, 3.2845e-02, 5.7565e-02},
           {9.1353e-02, 1.1158e-01, 3.7513e-02},
           {2.1367e-02, 9.4735e-03, 3.4155e-02},
           {2.7067e-02, 2.4241e-02, 9.1287e-03},
           {1.2676e-02, 1.3233e-02, 2.5175e-04},
           {2.8142e-03, 3.7420e-03, 1.8532e-03},
           {6.7871e-04, 2.0339e-04, 1.1253e-03},
           {9.6442e-04, 8.4702e-04, 3.4594e-04},
           {4.7010e-04, 4.8793e-04, 1.1421e-06},
           {1.0853e-04, 1.4200e-04, 6.6884e-05},
       }}},
      {MethodConfig::two_stage(0.5), 0.01,
       {{
           {2.0617e-06, 3.7958e-06, 4.2273e-06},
           {4.8728e-06, 7.8086e-06, 6.0057e-06},
           {4.9381e-06, 3.3219e-06, 4.0089e-06},
           {4.6001e-06, 4.3271e-06, 1.0246e-06},
           {2.2045e-06, 2.4134e-06, 2.9472e-07},
           {3.6937e-07, 6.0478e-07, 5.0476e-07},
           {3.2916e-07, 2.1215e-07, 2.9230e-07},
           {3.3149e-07, 3.0952e-07, 7.7360e-08},
           {1.5024e-07, 1.6457e-07, 1.9940e-08},
           {2.2575e-08, 3.8093e-08, 3.3305e-08},
       }}},
      {MethodConfig::two_stage(1.0), 0.04,
       {{
           {1.5361e-03, 1.9805e-03, 6.4616e-03},
           {8.5945e-03, 1.3262e-02, 7.0901e-03},
           {4.9792e-03, 3.1234e-03, 4.8734e-03},
           {4.4063e-03, 4.1019e-03, 1.1500e-03},
           {1.9307e-03, 2.0774e-03, 1.7791e-04},
           {3.4475e-04, 5.1191e-04, 3.5437e-04},
           {1.8519e-04, 1.0561e-04, 1.9561e-04},
           {1.9198e-04, 1.7594e-04, 5.2216e-05},
           {8.5114e-05, 9.1504e-05, 7.3770e-06},
           {1.4865e-05, 2.2347e-05, 1.5720e-05},
       }}},
      {MethodConfig::two_stage(1.0), 0.01,
       {{
           {1.6156e-05, 1.0065e-05, 4.0029e-06},
           {6.7043e-06, 9.7256e-06, 4.8799e-06},
           {3.3433e-06, 1.6740e-06, 3.5795e-06},
           {3.1021e-06, 2.8133e-06, 9.7422e-07},
           {1.4654e-06, 1.5507e-06, 5.3838e-08},
           {3.2398e-07, 4.3844e-07, 2.3630e-07},
           {9.9956e-08, 4.0592e-08, 1.4400e-07},
           {1.3241e-07, 1.1792e-07, 4.3785e-08},
           {6.4516e-08, 6.7691e-08, 1.8473e-09},
           {1.4119e-08, 1.9205e-08, 1.0349e-08},
       }}},
      {MethodConfig::rk4(), 0.04,
       {{
           {4.2184e-02, 2.3244e-02, 2.1487e-02},
           {2.1815e-02, 3.3483e-02, 2.3926e-02},
           {1.7573e-02, 1.3117e-02, 1.3310e-02},
           {1.3504e-02, 1.2992e-02, 2.3494e-03},
           {5.1771e-03, 5.8316e-03, 1.0917e-03},
           {4.3010e-04, 9.9634e-04, 1.2432e-03},
           {8.7431e-04, 6.4763e-04, 5.8343e-04},
           {6.6585e-04, 6.4333e-04, 1.0654e-04},
           {2.4192e-04, 2.7694e-04, 5.9139e-05},
           {1.1922e-05, 3.9662e-05, 6.1925e-05},
       }}},
      {MethodConfig::rk4(), 0.01,
       {{
           {4.0999e-05, 2.2965e-05, 8.8756e-06},
           {1.0701e-05, 1.6094e-05, 1.0973e-05},
           {8.9941e-06, 6.7554e-06, 7.6197e-06},
           {8.8726e-06, 8.4220e-06, 1.7920e-06},
           {4.1519e-06, 4.5617e-06, 6.5426e-07},
           {6.1669e-07, 1.0786e-06, 9.9454e-07},
           {6.7845e-07, 4.5406e-07, 5.6068e-07},
           {6.4966e-07, 6.1090e-07, 1.4192e-07},
           {2.8740e-07, 3.1716e-07, 4.3333e-08},
           {3.9208e-08, 6.9809e-08, 6.6129e-08},
       }}},
  };
  return table;
}
const ConvergenceReference* table1_block(double c) {
  for (const auto& b : table1_reference()) {
    if (b.c == c) return &b;
  }
  return nullptr;
}

const SpringReference* table2_block(double c) {
  for (const auto& b : table2_reference()) {
    if (b.c == c) return &b;
  }
  return nullptr;
}

const LorenzReference* lorenz_block(const MethodConfig& method, double tau) {
  for (const auto& b : lorenz_reference()) {
    if (b.method.kind != method.kind || b.tau != tau) continue;
    if (method.kind == MethodConfig::Kind::TwoStage && b.method.c != method.c) continue;
    return &b;
  }
  return nullptr;
}

bool attach_table1(ErrorReport& report, double c) {
  const auto* block = table1_block(c);
  if (block == nullptr) return false;
  for (std::size_t i = 0; i < report.rows.size() && i < block->errors.size(); ++i) {
    report.rows[i].published = {block->errors[i]};
    if (!std::isnan(block->orders[i])) report.rows[i].published_order = block->orders[i];
  }
  return true;
}

bool attach_table2(ErrorReport& report, double c) {
  const auto* block = table2_block(c);
  if (block == nullptr) return false;
  for (auto& row : report.rows) {
    for (const auto& ref : block->rows) {
      if (ref.t == row.t) row.published = {ref.err_p, ref.err_q};
    }
  }
  return true;
}

bool attach_lorenz(ErrorReport& report, const MethodConfig& method, double tau) {
  const auto* block = lorenz_block(method, tau);
  if (block == nullptr) return false;
  for (auto& row : report.rows) {
    const auto k = static_cast<std::size_t>(std::llround(row.t));
    if (k >= 1 && k <= block->errors.size() && static_cast<double>(k) == row.t) {
      const auto& e = block->errors[k - 1];
      row.published.assign(e.begin(), e.end());
    }
  }
  return true;
}

bool agrees_to_digits(double computed, double published, int digits) {
  if (!std::isfinite(computed) || !std::isfinite(published)) return false;
  if (published == 0.0) return computed == 0.0;
  const double exponent = std::floor(std::log10(std::fabs(published)));
  const double half_unit = 0.5 * std::pow(10.0, exponent - digits + 1);
  return std::fabs(computed - published) <= half_unit * (1.0 + 1e-12);
}

}  // namespace twostage
