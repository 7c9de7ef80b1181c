#pragma once

#include <filesystem>
#include <iosfwd>

#include "cnm/embedding.hpp"
#include "cnm/matcher.hpp"

namespace cnm {

// Everything needed to score text with a trained model.
struct Checkpoint {
    ModelConfig model;
    Vocabulary vocab;
    ParameterSet params;
};

// Portable text format, version 1:
//
//   cnm-checkpoint 1
//   n <embedding dim>
//   vocab <|V|>
//   k <measurement count>
//   windows <l_1> ... <l_W>
//   mixture local|global
//   complex 1|0
//   max_length <tokens>
//   tokens            then |V| lines, one token each
//   amplitudes        then |V| lines of n reals
//   phases            then |V| lines of n reals
//   measurements      then k lines of 2n reals (re im pairs)
//   end
//
// Reals are written with 17 significant digits, so a save/load round trip is
// exact and equal parameters give byte-identical files.
void save_checkpoint(std::ostream& out, const Checkpoint& checkpoint);
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);

// Throws ParseError for malformed content and ConfigError when the header
// and the tables disagree on n, |V| or k.
Checkpoint load_checkpoint(std::istream& in, const std::string& source = "<checkpoint>");
Checkpoint load_checkpoint(const std::filesystem::path& path);

// ConfigError unless the tables match the model config and vocabulary.
void validate_checkpoint(const Checkpoint& checkpoint);

}  // namespace cnm
