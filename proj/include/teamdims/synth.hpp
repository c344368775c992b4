#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "teamdims/corpus.hpp"
#include "teamdims/rng.hpp"

namespace teamdims {

// Desk-scale stand-in for the (private) school chatlog. Surface forms come
// from per-dimension phrase banks modeled on the published exemplars; each
// bank keeps its own distinctive content words so the generated corpora are
// separable by any reasonable classifier. Labels are exactly the generating
// bank's dimension.
struct SynthSpec {
    std::array<std::size_t, 4> counts{}; // per dimension, canonical order
    std::size_t none_count = 0;
    std::uint64_t seed = 0;
    std::size_t team_size = 25; // messages per team_id block
};

namespace detail {

struct PhraseBanks {
    // {n} is a number slot, {name} a roster-name slot.
    std::array<std::vector<std::string>, 5> banks; // COD..TES, then none
    std::vector<std::string> roster;
};

inline const PhraseBanks& phrase_banks() {
    static const PhraseBanks banks = {
        {{
            // COD: time pressure, scheduling, moving the task along
            {
                "faster lah we have no time",
                "hurry up we have like {n} mins left",
                "omg only {n} mins left hurry",
                "quickly finish the poster the deadline is near",
                "submit the slides by {n} pm",
                "we should do question {n} first then the rest",
                "we need to wrap up in {n} mins",
                "move the schedule along the deadline is at {n}",
            },
            // MPM: checking on other members' work
            {
                "{name} are you okay with it",
                "{name} have you typed your part",
                "is your section okay so far {name}",
                "did you check the doc i shared",
                "how is your paragraph going",
                "you havent answered question {n} yet",
                "i will look over your answers after this",
                "is everyone keeping to the plan",
            },
            // CCF: disagreeing, clarifying, elaborating on ideas
            {
                "i disagree because plants dont reduce smoke",
                "what do you mean by that exactly",
                "i think the teacher should be kind instead",
                "that wont work because the cost is too high",
                "we must clarify this point before we argue more",
                "i see your point but the idea needs more detail",
                "maybe but consider the other side of the argument",
                "why do you say that can you explain",
            },
            // TES: support, affirmation, humor
            {
                "good job team :)",
                "dont worry we can do it",
                "thanks for the help {name} :)",
                "yes ok great idea",
                "lol that was funny",
                "cheer up guys we got this",
                "ikr this team is the best",
                "haha nice one :)",
            },
            // unlabeled chatter
            {
                "the sky is very blue today",
                "my computer is lagging again",
                "i am eating lunch after this class",
                "wah this worksheet is damn chim",
                "the layout here is macam the old app",
                "where did everyone go",
                "this chair is so uncomfortable",
                "my keyboard feels weird",
            },
        }},
        {"Alex", "Bob", "Mei", "Ravi", "Sam", "Tina"},
    };
    return banks;
}

inline std::string fill_slots(std::string text, Rng& rng, const std::vector<std::string>& roster) {
    auto replace_all = [&](const std::string& slot, auto&& value_fn) {
        std::size_t pos;
        while ((pos = text.find(slot)) != std::string::npos)
            text = text.substr(0, pos) + value_fn() + text.substr(pos + slot.size());
    };
    replace_all("{n}", [&] { return std::to_string(5 + draw(rng, 50)); });
    replace_all("{name}", [&] { return roster[draw(rng, roster.size())]; });
    return text;
}

} // namespace detail

// Names usable as a masking roster for synthetic corpora.
inline const std::vector<std::string>& synth_roster() {
    return detail::phrase_banks().roster;
}

inline Corpus generate_synthetic_corpus(const SynthSpec& spec) {
    const auto& banks = detail::phrase_banks();
    Rng rng(spec.seed);

    struct Draft {
        std::string text;
        LabelVector labels;
    };
    std::vector<Draft> drafts;
    for (std::size_t bank = 0; bank < 5; ++bank) {
        std::size_t quota = bank < 4 ? spec.counts[bank] : spec.none_count;
        for (std::size_t k = 0; k < quota; ++k) {
            const auto& phrases = banks.banks[bank];
            Draft d;
            d.text = detail::fill_slots(phrases[draw(rng, phrases.size())], rng, banks.roster);
            if (bank < 4) d.labels.bits[bank] = 1;
            drafts.push_back(std::move(d));
        }
    }
    shuffle(drafts, rng);

    Corpus corpus;
    corpus.messages.reserve(drafts.size());
    std::size_t team_size = spec.team_size == 0 ? 25 : spec.team_size;
    for (std::size_t i = 0; i < drafts.size(); ++i) {
        AnnotatedMessage m;
        auto padded = [](std::size_t value, std::size_t width) {
            std::string s = std::to_string(value);
            return s.size() >= width ? s : std::string(width - s.size(), '0') + s;
        };
        m.id = "m" + padded(i + 1, 6);
        m.team_id = "team_" + padded(i / team_size, 2);
        m.user = std::string("student_") + static_cast<char>('a' + (i % 4));
        m.text = std::move(drafts[i].text);
        m.labels = drafts[i].labels;
        corpus.messages.push_back(std::move(m));
    }
    corpus.meta["source"] = "synthetic";
    corpus.meta["synth_seed"] = std::to_string(spec.seed);
    return corpus;
}

// Adds a simulated second annotator: labels_b is labels with every bit
// independently flipped with probability p.
inline Corpus with_flipped_annotator(const Corpus& corpus, double p, std::uint64_t seed) {
    Corpus out = corpus;
    Rng rng(seed);
    for (auto& m : out.messages) {
        LabelVector b = m.labels;
        for (std::size_t d = 0; d < 4; ++d)
            if (unit_real(rng) < p) b.bits[d] = b.bits[d] ? 0 : 1;
        m.labels_b = b;
    }
    return out;
}

} // namespace teamdims
