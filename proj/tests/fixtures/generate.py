#!/usr/bin/env python3
"""Writes the fixture graphs, scripted model replies and datasets used by the
tests. Outputs are committed; rerun after editing this file."""

import json
from pathlib import Path

HERE = Path(__file__).resolve().parent


def write_kg(path, labels, triples):
    lines = ["# head\trelation\ttail"]
    for eid, label in labels.items():
        lines.append(f"#label\t{eid}\t{label}")
    for h, r, t in triples:
        lines.append(f"{h}\t{r}\t{t}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_script(path, entries):
    with path.open("w", encoding="utf-8") as f:
        for e in entries:
            f.write(json.dumps(e, ensure_ascii=False) + "\n")


def entry(template, matcher, response, **extra):
    e = {"template": template, "matcher": matcher, "response": response}
    e.update(extra)
    return e


def decomposition(triples):
    return "\n".join(json.dumps({"head": h, "relation": r, "tail": t}) for h, r, t in triples)


# ---------------------------------------------------------------------------
# Concert tour -> artist -> college

FIG2_Q = "Where did the 'Country Nation World Tour' concert artist go to college?"

FIG2_LABELS = {
    "m.cnwt": "Country Nation World Tour",
    "m.cnwt2012": "Country Nation World Tour 2012 Live",
    "m.paisley": "Brad Paisley",
    "m.bisciotti": "Steve Bisciotti",
    "m.belmont": "Belmont University",
    "m.predators": "Nashville Predators",
    "m.uab": "University of Alabama at Birmingham",
    "m.ravens": "Baltimore Ravens",
    "m.asn": "American Saturday Night",
    "m.country": "Country music",
    "m.glendale": "Glen Dale",
    "m.wv": "West Virginia",
    "m.nashville": "Nashville",
    "m.tennessee": "Tennessee",
    "m.usa": "United States of America",
    "m.johnglen": "John Marshall High School",
    "m.guitar": "Guitar",
    "m.bba": "Bachelor of Business Administration",
    "m.bridgestone": "Bridgestone Arena",
    "m.millersville": "Millersville, Maryland",
}

FIG2_TRIPLES = [
    ("m.cnwt", "music.concert_tour.artist", "m.paisley"),
    ("m.cnwt", "music.concert_tour.album_or_release_supporting", "m.asn"),
    ("m.cnwt", "event.held_with", "m.bisciotti"),
    ("m.cnwt2012", "music.concert_tour.artist", "m.paisley"),
    ("m.paisley", "music.artist.concert_tours", "m.cnwt"),
    ("m.paisley", "people.person.education", "m.cvt_edu1"),
    ("m.paisley", "people.person.education", "m.cvt_edu2"),
    ("m.paisley", "sports.sports_team_owner.teams_owned", "m.predators"),
    ("m.paisley", "people.person.place_of_birth", "m.glendale"),
    ("m.paisley", "music.artist.genre", "m.country"),
    ("m.paisley", "music.group_member.instruments_played", "m.guitar"),
    ("m.paisley", "people.person.nationality", "m.usa"),
    ("m.cvt_edu1", "education.education.student", "m.paisley"),
    ("m.cvt_edu1", "education.education.institution", "m.belmont"),
    ("m.cvt_edu2", "education.education.student", "m.paisley"),
    ("m.cvt_edu2", "education.education.institution", "m.johnglen"),
    ("m.belmont", "location.location.containedby", "m.nashville"),
    ("m.belmont", "education.educational_institution.students_graduates", "m.cvt_edu1"),
    ("m.johnglen", "location.location.containedby", "m.glendale"),
    ("m.bisciotti", "people.person.education", "m.cvt_edu3"),
    ("m.bisciotti", "sports.sports_team_owner.teams_owned", "m.ravens"),
    ("m.bisciotti", "people.person.place_of_birth", "m.millersville"),
    ("m.bisciotti", "people.person.nationality", "m.usa"),
    ("m.cvt_edu3", "education.education.student", "m.bisciotti"),
    ("m.cvt_edu3", "education.education.institution", "m.uab"),
    ("m.cvt_edu3", "education.education.degree", "m.bba"),
    ("m.predators", "sports.sports_team.arena_stadium", "m.bridgestone"),
    ("m.predators", "sports.sports_team.location", "m.nashville"),
    ("m.bridgestone", "location.location.containedby", "m.nashville"),
    ("m.ravens", "sports.sports_team.owner_s", "m.bisciotti"),
    ("m.asn", "music.album.artist", "m.paisley"),
    ("m.asn", "music.album.genre", "m.country"),
    ("m.glendale", "location.location.containedby", "m.wv"),
    ("m.wv", "location.location.containedby", "m.usa"),
    ("m.nashville", "location.location.containedby", "m.tennessee"),
    ("m.tennessee", "location.location.containedby", "m.usa"),
    ("m.uab", "location.location.containedby", "m.usa"),
    ("m.millersville", "location.location.containedby", "m.usa"),
    ("m.country", "music.genre.artists", "m.paisley"),
    ("m.usa", "location.country.capital", "m.washington"),
]

FIG2_PLAN = [
    ("Country Nation World Tour", "concert tour artist", "artist#1"),
    ("artist#1", "went to college", "college#1"),
]

FIG2_SCRIPT = [
    entry("question_type", FIG2_Q, "{Chain Structure}: the artist has to be found before the college."),
    entry("decompose", FIG2_Q, decomposition(FIG2_PLAN)),
    entry("relation_prune", "Triple: {Country Nation World Tour, concert tour artist, artist#1}",
          "1. {music.concert_tour.artist (Score: 0.7)}: This relation names the artist of the tour.\n"
          "2. {event.held_with (Score: 0.3)}: People the tour was held with may include the artist."),
    entry("triple_prune", "Filter Triple: {Country Nation World Tour, concert tour artist, artist#1}",
          "1. {Country Nation World Tour, music.concert_tour.artist, Brad Paisley. (Score: 0.8)}: The artist of the tour.\n"
          "2. {Country Nation World Tour, event.held_with, Steve Bisciotti. (Score: 0.2)}: Related, but not the artist."),
    entry("relation_prune", "Triple: {Brad Paisley, went to college, college#1}",
          "1. {people.person.education (Score: 0.6)}: Education records name the college.\n"
          "2. {sports.sports_team_owner.teams_owned (Score: 0.4)}: Weakly related."),
    entry("triple_prune", "Filter Triple: {Brad Paisley, went to college, college#1}",
          "1. {Brad Paisley, people.person.education, UnName_Entity; UnName_Entity, education.education.institution, Belmont University. (Score: 0.7)}: A university he attended.\n"
          "2. {Brad Paisley, people.person.education, UnName_Entity; UnName_Entity, education.education.institution, John Marshall High School. (Score: 0.3)}: A high school, not a college."),
    entry("relation_prune", "Triple: {Steve Bisciotti, went to college, college#1}",
          "1. {people.person.education (Score: 0.7)}: Education records.\n"
          "2. {sports.sports_team_owner.teams_owned (Score: 0.3)}: Teams he owns."),
    entry("triple_prune", "Filter Triple: {Steve Bisciotti, went to college, college#1}",
          "1. {Steve Bisciotti, people.person.education, UnName_Entity; UnName_Entity, education.education.institution, University of Alabama at Birmingham. (Score: 0.9)}: His university.\n"
          "2. {Steve Bisciotti, sports.sports_team_owner.teams_owned, Baltimore Ravens. (Score: 0.1)}: Not a college."),
    entry("chain_select", ["Question: " + FIG2_Q],
          "The best reasoning chain is chain 1: {Country Nation World Tour, music.concert_tour.artist, Brad Paisley}, "
          "{Brad Paisley, people.person.education, UnName_Entity}, {UnName_Entity, education.education.institution, Belmont University}."),
    entry("answer_chain", FIG2_Q,
          "Following the question decomposition triples:\n"
          "Step 1: The artist of the Country Nation World Tour is Brad Paisley.\n"
          "Step 2: Brad Paisley attended Belmont University.\n{Belmont University}"),
    entry("answer_pdr_chain", FIG2_Q,
          "Step 1: The tour was headlined by Brad Paisley.\nStep 2: He studied at Belmont University.\n{Belmont University}"),
    entry("answer_io", FIG2_Q, "{Belmont University}"),
    entry("answer_cot", FIG2_Q, "Brad Paisley headlined that tour and graduated from Belmont University. The answer is {Belmont University}"),
]

# ---------------------------------------------------------------------------
# Countries bordering France with an airport serving Nijmegen

NIJ_Q = "What country bordering France contains an airport that serves Nijmegen?"
CMP_Q = "Which country bordering France has a population greater than 80 million?"
SUP_Q = "Which country bordering France has the smallest area?"

NIJ_LABELS = {
    "m.france": "France",
    "m.belgium": "Belgium",
    "m.germany": "Germany",
    "m.italy": "Italy",
    "m.switzerland": "Switzerland",
    "m.netherlands": "Netherlands",
    "m.nijmegen": "Nijmegen",
    "m.gelderland": "Gelderland",
    "m.europe": "Europe",
    "m.weeze": "Weeze Airport",
    "m.eindhoven": "Eindhoven Airport",
    "m.paris": "Paris",
    "m.berlin": "Berlin",
}

NIJ_TRIPLES = [
    ("m.belgium", "location.location.adjoins", "m.france"),
    ("m.germany", "location.location.adjoins", "m.france"),
    ("m.italy", "location.location.adjoins", "m.france"),
    ("m.switzerland", "location.location.adjoins", "m.france"),
    ("m.france", "location.location.adjoins", "m.belgium"),
    ("m.france", "location.location.adjoins", "m.germany"),
    ("m.france", "location.country.capital", "m.paris"),
    ("m.europe", "location.location.contains", "m.france"),
    ("m.europe", "location.location.contains", "m.germany"),
    ("m.germany", "location.country.capital", "m.berlin"),
    ("m.germany", "location.location.airport_serves", "m.nijmegen"),
    ("m.netherlands", "location.location.airport_serves", "m.nijmegen"),
    ("m.netherlands", "location.location.contains", "m.nijmegen"),
    ("m.gelderland", "location.location.contains", "m.nijmegen"),
    ("m.weeze", "aviation.airport.serves", "m.nijmegen"),
    ("m.eindhoven", "aviation.airport.serves", "m.eindhoven_city"),
    ("m.weeze", "location.location.containedby", "m.germany"),
]

NIJ_SCRIPT = [
    entry("question_type", NIJ_Q, "{Parallel Structure}: both conditions can be checked independently."),
    entry("decompose", NIJ_Q, decomposition([
        ("country#1", "borders", "France"),
        ("country#1", "contains an airport that serves", "Nijmegen"),
    ])),
    entry("relation_prune", "Triple: {country#1, borders, France}",
          "1. {location.location.adjoins (Score: 1.0)}: Adjoining countries share a border."),
    entry("relation_prune", "Triple: {country#1, contains an airport that serves, Nijmegen}",
          "1. {location.location.airport_serves (Score: 0.9)}: Countries with an airport serving the city.\n"
          "2. {aviation.airport.serves (Score: 0.1)}: Airports, not countries."),
    entry("answer_parallel", NIJ_Q,
          "Following the question decomposition Triples:\n"
          "Step 1: The countries bordering France are Belgium, Germany, Italy, and Switzerland.\n"
          "Step 2: The countries with an airport serving Nijmegen are Germany and Netherlands.\n"
          "Step 3: The intersection is Germany.\n{Germany}"),
    entry("answer_pdr_parallel", NIJ_Q, "Step 1: Germany borders France. Step 2: Weeze Airport in Germany serves Nijmegen.\n{Germany}"),
    entry("answer_io", NIJ_Q, "{Germany}"),
    entry("answer_cot", NIJ_Q, "Weeze Airport lies in Germany, which borders France. The answer is {Germany}"),
]

CMP_SCRIPT = [
    entry("question_type", CMP_Q, "{Parallel Structure}"),
    entry("decompose", CMP_Q, decomposition([
        ("country#1", "borders", "France"),
        ("country#1", "has population greater than", "80 million"),
    ])),
    entry("answer_parallel", CMP_Q,
          "Step 1: The countries bordering France are Belgium, Germany, Italy, and Switzerland.\n"
          "Step 2: Only Germany has more than 80 million inhabitants.\n{Germany}"),
    entry("answer_pdr_parallel", CMP_Q, "{Germany}"),
    entry("answer_io", CMP_Q, "{Germany}"),
    entry("answer_cot", CMP_Q, "Germany has about 83 million people. The answer is {Germany}"),
]

SUP_SCRIPT = [
    entry("question_type", SUP_Q, "{Parallel Structure}"),
    entry("decompose", SUP_Q, decomposition([
        ("country#1", "borders", "France"),
        ("country#1", "has the smallest", "area#1"),
    ])),
    entry("answer_parallel", SUP_Q,
          "Step 1: The countries bordering France are Belgium, Germany, Italy, and Switzerland.\n"
          "Step 2: Of these, Belgium has the smallest area.\n{Belgium}"),
    entry("answer_pdr_parallel", SUP_Q, "{Belgium}"),
    entry("answer_io", SUP_Q, "{Belgium}"),
    entry("answer_cot", SUP_Q, "Belgium is the smallest of them. The answer is {Belgium}"),
]

# ---------------------------------------------------------------------------
# Religious head of a region in the United Kingdom

WM_Q = "William Morris is religions head in which region that is part of the United Kingdom?"

WM_LABELS = {
    "m.morris": "William Morris",
    "m.morris_agency": "William Morris Agency",
    "m.wales": "Wales",
    "m.england": "England",
    "m.scotland": "Scotland",
    "m.nireland": "Northern Ireland",
    "m.uk": "United Kingdom",
    "m.bishop": "Bishop",
    "m.cardiff": "Cardiff",
}

WM_TRIPLES = [
    ("m.cvt_lead", "religion.religious_organization_leadership.leader", "m.morris"),
    ("m.cvt_lead", "religion.religious_organization_leadership.jurisdiction", "m.wales"),
    ("m.morris", "religion.religious_leader.religious_leadership", "m.cvt_lead"),
    ("m.wales", "religion.religious_leadership_jurisdiction.leader", "m.cvt_lead"),
    ("m.morris", "people.person.nationality", "m.uk"),
    ("m.morris", "people.person.profession", "m.bishop"),
    ("m.wales", "location.location.containedby", "m.uk"),
    ("m.england", "location.location.containedby", "m.uk"),
    ("m.scotland", "location.location.containedby", "m.uk"),
    ("m.nireland", "location.location.containedby", "m.uk"),
    ("m.wales", "location.country.capital", "m.cardiff"),
    ("m.morris_agency", "business.company.industry", "m.talent"),
]

WM_PLAN = [
    ("William Morris", "is religious head in", "region#1"),
    ("region#1", "is part of", "United Kingdom"),
]

WM_COMMON = [
    entry("decompose", WM_Q, decomposition(WM_PLAN)),
    entry("relation_prune", "Triple: {William Morris, is religious head in, region#1}",
          "1. {religion.religious_leader.religious_leadership (Score: 0.8)}: Religious leadership roles.\n"
          "2. {people.person.profession (Score: 0.0)}: The profession does not give a region."),
    entry("relation_prune", "Triple: {Wales, is part of, United Kingdom}",
          "1. {location.location.containedby (Score: 1.0)}: Containment names the larger region."),
    entry("relation_prune", "Triple: {region#1, is part of, United Kingdom}",
          "1. {location.location.containedby (Score: 1.0)}: Regions contained by the United Kingdom."),
]

WM_CHAIN_SCRIPT = [
    entry("question_type", WM_Q, "{Chain Structure}"),
    *WM_COMMON,
    entry("answer_chain", WM_Q,
          "Step 1: William Morris leads a religious organization whose jurisdiction is Wales.\n"
          "Step 2: Wales is contained within the United Kingdom.\n{Wales}"),
]

WM_PARALLEL_SCRIPT = [
    entry("question_type", WM_Q, "{Parallel Structure}"),
    *WM_COMMON,
    entry("answer_parallel", WM_Q,
          "Step 1: Wales is the region linked to his religious leadership.\n"
          "Step 2: The United Kingdom consists of England, Scotland, Wales, and Northern Ireland.\n"
          "Step 3: The region in both sets is Wales.\n{Wales}"),
]

# ---------------------------------------------------------------------------
# Beam suite: the bridge the model scores highest at hop 1 is not always right.
# Each record: anchor -> {bridge A, bridge B, bridge C} -> one answer each.
# `rank` is the position of the correct bridge after triple pruning.

BEAM_RECORDS = [
    # (slug, rank)
    ("amber", 1), ("birch", 2), ("cedar", 1), ("delta", 2), ("ember", 1),
    ("fjord", 2), ("grove", 1), ("heron", 3), ("iris", 1), ("juniper", 2),
]

BEAM_SCORES = [0.6, 0.3, 0.1]


def beam_fixture():
    labels, triples, script, records = {}, [], [], []
    for slug, rank in BEAM_RECORDS:
        title = slug.capitalize()
        anchor = f"m.{slug}_festival"
        labels[anchor] = f"{title} Festival"
        q = f"What river flows through the home town of the {title} Festival founder?"
        bridges = []
        for i in range(3):
            b = f"m.{slug}_person{i + 1}"
            town = f"m.{slug}_town{i + 1}"
            river = f"m.{slug}_river{i + 1}"
            labels[b] = f"{title} Founder {i + 1}"
            labels[town] = f"{title} Town {i + 1}"
            labels[river] = f"{title} River {i + 1}"
            triples.append((anchor, "event.festival.founders", b))
            triples.append((b, "people.person.place_of_birth", town))
            triples.append((town, "geography.river.towns_inverse", river))
            bridges.append(i + 1)
        # Bridge `rank` (1-based, by model score) is the correct one; bridge
        # numbering is fixed so the score order decides the beam.
        order = [k for k in range(1, 4)]
        correct = rank
        plan = [
            (f"{title} Festival", "was founded by", "person#1"),
            ("person#1", "was born in", "town#1"),
            ("town#1", "is crossed by", "river#1"),
        ]
        script.append(entry("question_type", q, "{Chain Structure}"))
        script.append(entry("decompose", q, decomposition(plan)))
        lines = []
        for pos, k in enumerate(order):
            lines.append(f"{pos + 1}. {{{title} Festival, event.festival.founders, {title} Founder {k}. "
                         f"(Score: {BEAM_SCORES[pos]})}}: candidate founder.")
        script.append(entry("triple_prune", f"Filter Triple: {{{title} Festival, was founded by, person#1}}",
                            "\n".join(lines)))
        right = f"{title} River {correct}"
        # Width 2 presents two chains; the selector picks the one through the
        # correct founder when it is there.
        sel = 1 if correct == 1 else 2
        script.append(entry("chain_select", ["Question: " + q, right],
                            f"The best reasoning chain is chain {sel}."))
        script.append(entry("chain_select", ["Question: " + q],
                            "The best reasoning chain is chain 1."))
        for k in range(1, 4):
            river = f"{title} River {k}"
            script.append(entry("answer_chain", [q, river],
                                f"Following the chain, the river is {river}.\n{{{river}}}"))
        records.append({"id": f"beam-{slug}", "question": q, "answers": [[right]], "qtype": "composition"})
    return labels, triples, script, records


# ---------------------------------------------------------------------------


def main():
    fx = HERE
    write_kg(fx / "fig2.tsv", FIG2_LABELS, FIG2_TRIPLES)
    write_script(fx / "fig2_script.jsonl", FIG2_SCRIPT)
    write_kg(fx / "nijmegen.tsv", NIJ_LABELS, NIJ_TRIPLES)
    write_script(fx / "nijmegen_script.jsonl", NIJ_SCRIPT)
    write_kg(fx / "morris.tsv", WM_LABELS, WM_TRIPLES)
    write_script(fx / "morris_chain_script.jsonl", WM_CHAIN_SCRIPT)
    write_script(fx / "morris_parallel_script.jsonl", WM_PARALLEL_SCRIPT)

    labels, triples, script, records = beam_fixture()
    write_kg(fx / "beam.tsv", labels, triples)
    write_script(fx / "beam_script.jsonl", script)
    with (fx / "beam_suite.jsonl").open("w", encoding="utf-8") as f:
        for r in records:
            f.write(json.dumps(r) + "\n")

    # Four-record suite, one question per type, over the union graph.
    write_kg(fx / "suite.tsv", {**FIG2_LABELS, **NIJ_LABELS}, FIG2_TRIPLES + NIJ_TRIPLES)
    write_script(fx / "suite_script.jsonl", FIG2_SCRIPT + NIJ_SCRIPT + CMP_SCRIPT + SUP_SCRIPT)
    suite = [
        {"ID": "suite-composition", "question": FIG2_Q, "compositionality_type": "composition",
         "answers": [{"answer": "Belmont University", "aliases": ["Belmont"]}]},
        {"ID": "suite-conjunction", "question": NIJ_Q, "compositionality_type": "conjunction",
         "answers": [{"answer": "Germany", "aliases": ["Federal Republic of Germany"]}]},
        {"ID": "suite-comparative", "question": CMP_Q, "compositionality_type": "comparative",
         "answers": [{"answer": "Germany", "aliases": []}]},
        {"ID": "suite-superlative", "question": SUP_Q, "compositionality_type": "superlative",
         "answers": [{"answer": "Belgium", "aliases": ["Kingdom of Belgium"]}]},
    ]
    with (fx / "suite_cwq.jsonl").open("w", encoding="utf-8") as f:
        for r in suite:
            f.write(json.dumps(r) + "\n")


if __name__ == "__main__":
    main()
