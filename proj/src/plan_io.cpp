#include <iomanip>
#include <map>
#include <sstream>

#include "cimpmm/mapping.hpp"

namespace cimpmm {

std::string describe_plan(const MappingPlan& plan) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3);
  os << "# mapping plan v1\n";
  os << "mode " << to_string(plan.mode) << "\n";
  os << "weights rows=" << plan.weight_rows << " cols=" << plan.weight_cols << " bits=" << plan.weight_bits << "\n";
  os << "array rows=" << plan.xbar.rows << " cols=" << plan.xbar.cols << " cols_per_adc=" << plan.xbar.cols_per_adc
     << "\n";
  os << "grid row_tiles=" << plan.row_tiles << " col_tiles=" << plan.col_tiles << " bit_cols=" << plan.bit_cols
     << "\n";
  os << "pe_count " << plan.pe_count << "\n";
  os << "logical_arrays " << plan.logical_count() << "\n";
  os << "physical_arrays " << plan.physical_count() << "\n";
  os << "reuse_factor " << plan.reuse_factor() << "\n";
  os << "shift_adders " << plan.shift_adder_count << "\n";
  os << "adder_tree_nodes " << plan.adder_tree_nodes << "\n";
  os << "array_budget " << (plan.array_budget ? std::to_string(*plan.array_budget) : std::string("none"))
     << " time_multiplex=" << plan.time_multiplex << " instantiated=" << plan.instantiated_arrays() << "\n";

  for (std::size_t pe = 0; pe < plan.pe_count; ++pe) {
    os << "pe " << pe << " shift=" << plan.pe_shift[pe] << " distinct=" << plan.distinct_in_pe(pe) << " tiles=";
    bool first = true;
    for (std::size_t l = 0; l < plan.logical_count(); ++l) {
      const LogicalTile& t = plan.logical_tiles[l];
      if (t.pe != pe) continue;
      os << (first ? "" : ",") << "(" << t.row_tile << "," << t.col_tile << ")->" << plan.reuse_map[l];
      first = false;
    }
    os << "\n";
  }

  std::map<std::size_t, std::size_t> uses;
  for (std::size_t id : plan.reuse_map) ++uses[id];
  for (std::size_t id = 0; id < plan.physical_count(); ++id) {
    os << "physical " << id << " uses=" << uses[id] << " ones=" << plan.physical_arrays[id].popcount()
       << (plan.physical_arrays[id].is_zero() ? " zero" : "") << "\n";
  }
  return os.str();
}

}  // namespace cimpmm
