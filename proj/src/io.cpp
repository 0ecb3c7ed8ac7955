#include "harmonica/io.hpp"

#include <fstream>
#include <sstream>

#include "harmonica/errors.hpp"

namespace harmonica {

using nlohmann::ordered_json;

namespace {

// Translate a byte offset into "line L, column C" (both 1-based).
std::string locate(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t k = 0; k < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

nlohmann::json game_to_json(const Game& g) {
  nlohmann::json doc;
  doc["players"] = g.num_players();
  doc["actions"] = g.action_counts();
  auto payoffs = nlohmann::json::array();
  for (int i = 0; i < g.num_players(); ++i) {
    const auto& u = g.payoffs(i);
    payoffs.push_back(std::vector<double>(u.data(), u.data() + u.size()));
  }
  doc["payoffs"] = std::move(payoffs);
  return doc;
}

std::string dump_game(const Game& g) {
  ordered_json doc;
  doc["players"] = g.num_players();
  doc["actions"] = g.action_counts();
  auto payoffs = ordered_json::array();
  for (int i = 0; i < g.num_players(); ++i) {
    const auto& u = g.payoffs(i);
    payoffs.push_back(std::vector<double>(u.data(), u.data() + u.size()));
  }
  doc["payoffs"] = std::move(payoffs);
  return doc.dump() + "\n";
}

Game game_from_json(const nlohmann::json& doc) {
  try {
    if (!doc.is_object()) throw InputError("game document must be a JSON object");
    for (const char* key : {"players", "actions", "payoffs"})
      if (!doc.contains(key)) throw InputError(std::string("missing key \"") + key + "\"");

    const int players = doc.at("players").get<int>();
    const auto actions = doc.at("actions").get<std::vector<int>>();
    if (players < 1 || static_cast<int>(actions.size()) != players)
      throw InputError("\"actions\" must list one count per player");
    const auto& pay = doc.at("payoffs");
    if (!pay.is_array() || static_cast<int>(pay.size()) != players)
      throw InputError("\"payoffs\" must hold one array per player");

    std::vector<Eigen::VectorXd> tensors;
    for (const auto& row : pay) {
      const auto values = row.get<std::vector<double>>();
      tensors.emplace_back(Eigen::Map<const Eigen::VectorXd>(values.data(),
                                                             static_cast<Eigen::Index>(values.size())));
    }
    return Game(actions, std::move(tensors));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("invalid game document: ") + e.what());
  }
}

Game parse_game(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError("malformed JSON at " + locate(text, e.byte == 0 ? 0 : e.byte - 1) + ": " +
                     e.what());
  }
  return game_from_json(doc);
}

Game load_game(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_game(ss.str());
}

void save_game(const Game& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << dump_game(g);
}

}  // namespace harmonica
