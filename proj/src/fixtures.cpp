#include "profilernet/fixtures.hpp"

#include <initializer_list>
#include <string>
#include <vector>

namespace profilernet::fixtures {

namespace {

struct Builder {
  Network net;

  void variable(std::string id, std::string name, Category category, Role role,
                std::vector<std::string> states) {
    net.variables.push_back(
        {id, std::move(name), category, role, std::move(states)});
    net.structure.nodes.push_back(id);
    net.cpts.push_back({std::move(id), {}, {}});
  }

  void cpt(const std::string& id, std::vector<std::string> parents,
           std::vector<std::vector<double>> rows) {
    Cpt& cpt = net.cpts[net.variable_index(id)];
    for (const auto& p : parents) net.structure.edges.push_back({p, id});
    cpt.parent_ids = std::move(parents);
    cpt.rows = std::move(rows);
  }

  void binary(std::string id, std::string name, Category category, Role role) {
    variable(std::move(id), std::move(name), category, role,
             {"absent", "present"});
  }

  // Rows given as P(present) per parent configuration.
  void present(const std::string& id, std::vector<std::string> parents,
               std::initializer_list<double> p_present) {
    std::vector<std::vector<double>> rows;
    for (double p : p_present) rows.push_back({1.0 - p, p});
    cpt(id, std::move(parents), std::move(rows));
  }
};

}  // namespace

Network three_node_example() {
  Builder b;
  b.net.metadata = {{"name", "three-node-example"},
                    {"provenance", "hypothesis"}};
  b.variable("X1", "X1", Category::OTHER, Role::input,
             {"x1_1", "x1_2", "x1_3"});
  b.variable("X2", "X2", Category::OTHER, Role::output, {"x2_1", "x2_2"});
  b.variable("X3", "X3", Category::OTHER, Role::output, {"x3_1", "x3_2"});
  b.cpt("X1", {}, {{0.2, 0.5, 0.3}});
  b.cpt("X2", {"X1"}, {{0.2, 0.8}, {0.9, 0.1}, {0.5, 0.5}});
  b.cpt("X3", {"X1"}, {{0.7, 0.3}, {0.4, 0.6}, {0.1, 0.9}});
  return b.net;
}

Network profiling_example() {
  Builder b;
  b.net.metadata = {{"name", "synthetic-homicide-profile"},
                    {"provenance", "hypothesis"},
                    {"note", "synthetic parameters, not empirical"}};

  // Offender variables.
  b.binary("off_prior_offenses", "Offender has prior offenses", Category::OFF,
           Role::output);
  b.binary("off_prior_arrests", "Offender has prior arrests", Category::OFF,
           Role::output);
  b.binary("off_knew_victim", "Offender and victim were acquainted",
           Category::OFF, Role::output);
  b.variable("off_gender", "Offender gender", Category::OFF, Role::output,
             {"female", "male"});

  // Crime-scene variables.
  b.binary("cs_multiple_wounds_one_area", "Multiple wounding to one area",
           Category::FA, Role::input);
  b.binary("cs_drugged_victim", "Drugging the victim", Category::FA,
           Role::input);
  b.binary("cs_sexual_assault", "Sexual assault", Category::FA, Role::input);
  b.binary("cs_weapon_from_scene", "Weapon taken from the scene",
           Category::FA, Role::input);
  b.binary("cs_body_hidden", "Body was hidden", Category::CSA, Role::input);
  b.binary("cs_body_transported", "Body was transported after the killing",
           Category::CSA, Role::input);
  b.binary("cs_victim_bound", "Victim was bound or gagged", Category::CSA,
           Role::input);
  b.binary("cs_victim_tortured", "Victim was tortured", Category::CSA,
           Role::input);
  b.binary("cs_property_stolen", "Property taken from the scene",
           Category::CSA, Role::input);
  b.binary("va_victim_female", "Victim is female", Category::VA, Role::input);
  b.binary("va_victim_elderly", "Victim is over 65", Category::VA,
           Role::input);

  b.present("off_prior_offenses", {}, {0.45});
  b.present("off_prior_arrests", {"off_prior_offenses"}, {0.1, 0.8});
  b.present("off_knew_victim", {}, {0.55});
  b.cpt("off_gender", {}, {{0.2, 0.8}});

  // Parent configurations in mixed-radix order, last parent fastest.
  b.present("cs_multiple_wounds_one_area", {"off_knew_victim"}, {0.2, 0.75});
  b.present("cs_drugged_victim", {"off_gender", "off_knew_victim"},
            {0.3, 0.6, 0.05, 0.15});
  b.present("cs_sexual_assault", {"off_gender", "off_knew_victim"},
            {0.05, 0.02, 0.55, 0.15});
  b.present("cs_weapon_from_scene", {"off_prior_offenses", "off_knew_victim"},
            {0.3, 0.8, 0.15, 0.6});
  b.present("cs_body_hidden", {"off_prior_offenses", "off_knew_victim"},
            {0.1, 0.5, 0.35, 0.8});
  b.present("cs_body_transported", {"off_prior_offenses", "cs_body_hidden"},
            {0.05, 0.3, 0.2, 0.7});
  b.present("cs_victim_bound", {"off_prior_arrests", "cs_sexual_assault"},
            {0.05, 0.4, 0.25, 0.75});
  b.present("cs_victim_tortured", {"off_gender", "cs_sexual_assault"},
            {0.02, 0.1, 0.08, 0.45});
  b.present("cs_property_stolen", {"off_prior_offenses", "off_prior_arrests"},
            {0.1, 0.3, 0.5, 0.7});
  b.present("va_victim_female", {"off_gender", "off_knew_victim"},
            {0.4, 0.5, 0.6, 0.55});
  b.present("va_victim_elderly", {"off_knew_victim"}, {0.2, 0.08});
  return b.net;
}

}  // namespace profilernet::fixtures
