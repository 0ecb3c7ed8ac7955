#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "harmonica/game.hpp"

namespace harmonica {

/// Canonical game document:
///   {"players": N, "actions": [n_1, ..., n_N], "payoffs": [[...], ...]}
/// with one flat row-major payoff array per player.
nlohmann::json game_to_json(const Game& g);
Game game_from_json(const nlohmann::json& doc);

/// Byte-stable serialization (fixed key order, shortest round-trip doubles).
std::string dump_game(const Game& g);

/// Parse a game document. Malformed JSON throws InputError carrying the
/// line and column of the failure; schema violations throw InputError.
Game parse_game(const std::string& text);
Game load_game(const std::string& path);
void save_game(const Game& g, const std::string& path);

}  // namespace harmonica
