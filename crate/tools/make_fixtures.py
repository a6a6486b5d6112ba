#!/usr/bin/env python3
"""Regenerates the test fixtures under fixtures/.

analysis/lpp_style.jsonl      12 hand-written triples in the style of LIAR++:
                              the verdict opens by quoting the claim and
                              closes with a rating sentence.
analysis/lpp_style.manifest.json
                              length and overlap statistics computed here with
                              a separate splitter, tokenizer and ROUGE
                              implementation, used as the expected values.
bench/liarpp.jsonl, bench/fullfact.jsonl
                              seeded synthetic corpora: unrelated filler at
                              the head, the claim-relevant sentences (which
                              form the verdict) mid-article, and a tightly
                              knit topical cluster at the tail.

Run from the repository root: python3 tools/make_fixtures.py
"""

import json
import math
import random
import re
from collections import Counter
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
FIX = ROOT / "fixtures"

ABBREVIATIONS = {
    "U.S.", "U.K.", "U.N.", "E.U.", "D.C.", "Mr.", "Mrs.", "Ms.", "Dr.", "No.", "St.", "Jr.",
    "Sr.", "Sen.", "Rep.", "Gov.", "Gen.", "Lt.", "Col.", "Prof.", "Rev.", "Inc.", "Corp.", "Co.",
    "Ltd.", "vs.", "e.g.", "i.e.", "Jan.", "Feb.", "Mar.", "Apr.", "Aug.", "Sept.", "Oct.",
    "Nov.", "Dec.",
}
CALIBRATION = 1.35

# terminator run, optional closers, then whitespace and an (optionally quoted) capital
BOUNDARY = re.compile(r"([.!?]+)([\"')\]}”’]*)(?=\s+[\"'(\[“‘]?[A-Z]|\s*$)")


def split_sentences(text):
    out, start = [], 0
    for m in BOUNDARY.finditer(text):
        if m.group(1) == ".":
            word = text[:m.start() + 1].split()[-1]
            word = word.lstrip("\"'([“‘")
            if word in ABBREVIATIONS or re.fullmatch(r"[A-Z]\.", word):
                continue
        piece = text[start:m.end()].strip()
        if piece:
            out.append(piece)
        start = m.end()
    rest = text[start:].strip()
    if rest:
        out.append(rest)
    return out


def tokenize(text):
    return [t.lower() for t in re.findall(r"[^\W_]+", text)]


def subwords(n_tokens):
    return max(n_tokens, math.ceil(n_tokens * CALIBRATION - 1e-9))


def ngrams(tokens, n):
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def prf(overlap, cand_total, ref_total):
    p = overlap / cand_total if cand_total else 0.0
    r = overlap / ref_total if ref_total else 0.0
    f = 2 * p * r / (p + r) if p + r > 0 else 0.0
    return p, r, f


def rouge_n(cand, ref, n):
    c, r = ngrams(cand, n), ngrams(ref, n)
    overlap = sum(min(v, r[g]) for g, v in c.items())
    return prf(overlap, sum(c.values()), sum(r.values()))


def lcs(a, b):
    table = [[0] * (len(b) + 1) for _ in range(len(a) + 1)]
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            table[i + 1][j + 1] = table[i][j] + 1 if x == y else max(table[i][j + 1], table[i + 1][j])
    return table[-1][-1]


def rouge_all(cand, ref):
    l = lcs(cand, ref)
    return [rouge_n(cand, ref, 1), rouge_n(cand, ref, 2), prf(l, len(cand), len(ref))]


LPP_STYLE = [
    (
        "The state cut school funding by half in two years.",
        "Governor Lane spoke at a rally in Ashford on Monday. She told the crowd the state cut school funding by half in two years. "
        "Budget records from the U.S. Census Bureau tell a different story. Per-pupil spending fell 4 percent in 2019 and rose 3 percent in 2020. "
        "Dr. Amy Chen, an education economist, said the figures show a modest dip. Lane's office did not respond to questions.",
        "Lane said the state cut school funding by half in two years. Budget records show per-pupil spending dipped 4 percent and then recovered. "
        "That is nowhere near a fifty percent reduction. We rate this Pants on Fire.",
    ),
    (
        "Crime in Riverton doubled after the new mayor took office.",
        "A mailer from the Kline campaign makes a striking accusation. It says crime in Riverton doubled after the new mayor took office. "
        "Police data show reported offenses rose from 1,210 to 1,340. That is an increase of about 11 percent. "
        "Analysts caution that reporting practices changed in 2021.",
        "The mailer claims crime in Riverton doubled after the new mayor took office. Police data show an increase of about 11 percent. "
        "Reporting changes may explain part of it. We rate the statement False.",
    ),
    (
        "Most new jobs last year went to immigrants.",
        "Sen. Mark Ruiz made the remark during a televised debate. \"Most new jobs last year went to immigrants,\" he said. "
        "Labor surveys measure net employment changes by nativity. Foreign-born workers accounted for 38 percent of net gains. "
        "Economists note the survey has wide margins of error. The remainder went to native-born workers.",
        "Ruiz said most new jobs last year went to immigrants. Survey data credit foreign-born workers with 38 percent of net gains. "
        "A majority went to native-born workers. We rate it Mostly False.",
    ),
    (
        "The county spends more on consultants than on road repair.",
        "Commissioner Otto posted the comparison on social media. He wrote that the county spends more on consultants than on road repair. "
        "The adopted budget lists $4.2 million for outside professional services. Road maintenance received $9.8 million. "
        "Otto said he was counting only discretionary contracts. Even by that measure, paving outspent advisers.",
        "Otto claimed the county spends more on consultants than on road repair. Budget lines show paving received more than double. "
        "His narrower definition does not change the result. We rate this claim False.",
    ),
    (
        "Electric cars produce more emissions than gas cars over their lifetime.",
        "A viral video argues that electric cars produce more emissions than gas cars over their lifetime. "
        "Lifecycle studies count manufacturing, battery production and power generation. Most find battery vehicles start with a carbon debt. "
        "That debt is usually repaid within two years of typical driving. Over a full lifetime, totals are lower for battery models.",
        "The video says electric cars produce more emissions than gas cars over their lifetime. Studies find a higher manufacturing footprint. "
        "Lower operating output more than offsets it within a few years. We rate the claim Mostly False.",
    ),
    (
        "Our city has the highest water rates in the region.",
        "Councilwoman Dee Park repeated the line at three meetings. She said our city has the highest water rates in the region. "
        "A utility survey compared monthly bills for a standard household. Bellport ranked fourth out of nine nearby systems. "
        "Two neighboring towns charge noticeably more.",
        "Park said our city has the highest water rates in the region. A regional survey placed Bellport fourth of nine. "
        "Two neighbors charge more per month. We rate it False.",
    ),
    (
        "Teachers here earn less than the national average.",
        "Union leaders have said for months that teachers here earn less than the national average. "
        "Federal statistics put the statewide mean salary at $61,400. The national figure is $66,700. "
        "Cost of living adjustments narrow the gap but do not close it.",
        "Union leaders say teachers here earn less than the national average. Federal numbers confirm the statewide mean trails by about $5,000. "
        "Adjusting for prices narrows that gap. We rate this True.",
    ),
    (
        "The bridge project is two years behind schedule.",
        "The harbor crossing has drawn criticism from both parties. Rep. Hal Moss said the bridge project is two years behind schedule. "
        "The original contract set completion for May 2022. The transit agency now projects a summer 2024 opening. "
        "Officials blame supply shortages and a design change.",
        "Moss said the bridge project is two years behind schedule. Agency documents move the opening from May 2022 to summer 2024. "
        "That is roughly a two-year slip. We rate the statement True.",
    ),
    (
        "Half of the state's hospitals are losing money.",
        "A hospital association ad warns that half of the state's hospitals are losing money. "
        "Financial filings for 2022 cover 84 facilities. Of those, 31 reported negative operating margins. "
        "The share is closer to 37 percent. Rural facilities fared worst.",
        "The ad says half of the state's hospitals are losing money. Filings show 31 of 84 reported operating losses. "
        "That is about 37 percent, short of half. We rate it Half True.",
    ),
    (
        "Voter turnout hit a record high in the last election.",
        "Turnout reached 71 percent of registered voters last fall. Secretary Ames said voter turnout hit a record high in the last election. "
        "Archives show turnout of 74 percent in 1992. Measured against eligible adults the recent figure is also lower than 1992.",
        "Ames said voter turnout hit a record high in the last election. State archives show 1992 had higher participation. "
        "Recent turnout was strong but not a record. We rate this claim Mostly False.",
    ),
    (
        "The new tax will cost families two thousand dollars a year.",
        "Opponents of the levy say the new tax will cost families two thousand dollars a year.",
        "Opponents say the new tax will cost families two thousand dollars a year. Fiscal analysts estimate a median household impact near $340. "
        "Only the top income bracket approaches the figure. We rate it False.",
    ),
    (
        "Unemployment is at its lowest level in fifty years.",
        "In a speech on Tuesday, Gov. Ruth Bell highlighted the economy. She said unemployment is at its lowest level in fifty years. "
        "The state jobless rate fell to 3.1 percent in March. Records going back to 1976 show no lower reading. "
        "Comparable data before 1976 are not available. Economists said the claim is broadly supported.",
        "Bell said unemployment is at its lowest level in fifty years. The 3.1 percent rate is the lowest in records that begin in 1976. "
        "Earlier data are not comparable. We rate it Mostly True.",
    ),
]

PAIRS = {
    "verdict_article": ("verdict", "article"),
    "claim_verdict": ("claim", "verdict"),
    "claim_article": ("claim", "article"),
}


def analysis_fixture():
    rows = [
        {"id": f"lpp-{i:02d}", "dataset": "lpp_style", "claim": c, "article": a, "verdict": v}
        for i, (c, a, v) in enumerate(LPP_STYLE)
    ]
    seg = [{f: split_sentences(r[f]) for f in ("claim", "article", "verdict")} for r in rows]

    lengths = {}
    for field in ("article", "claim", "verdict"):
        toks = [len(tokenize(r[field])) for r in rows]
        lengths[field] = {
            "sentences_mean": sum(len(s[field]) for s in seg) / len(rows),
            "tokens_mean": sum(toks) / len(rows),
            "subwords_mean": sum(subwords(t) for t in toks) / len(rows),
        }
    art_sub = [subwords(len(tokenize(r["article"]))) for r in rows]
    exceed = {str(b): sum(s > b for s in art_sub) / len(rows) for b in (512, 1024)}

    overlaps = {}
    for pair, (ref_field, cont_field) in PAIRS.items():
        for variant in ("complete", "no_first", "no_last"):
            scores = []
            for r, s in sorted(zip(rows, seg), key=lambda x: x[0]["id"]):
                sents = s[cont_field]
                if variant == "no_first":
                    sents = sents[1:]
                elif variant == "no_last":
                    sents = sents[:-1]
                cand = [t for sent in sents for t in tokenize(sent)]
                if not cand:
                    continue
                scores.append(rouge_all(cand, tokenize(r[ref_field])))
            n = len(scores)
            overlaps[f"{pair}/{variant}"] = {
                "recall": [sum(sc[v][1] for sc in scores) / n for v in range(3)],
                "f1": [sum(sc[v][2] for sc in scores) / n for v in range(3)],
                "scored": n,
                "excluded": len(rows) - n,
            }

    manifest = {
        "triples": len(rows),
        "sentences": {r["id"]: {f: s[f] for f in s} for r, s in zip(rows, seg)},
        "lengths": lengths,
        "exceed": exceed,
        "overlaps": overlaps,
    }
    out = FIX / "analysis"
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "lpp_style.jsonl", "w") as fh:
        for r in rows:
            fh.write(json.dumps(r) + "\n")
    with open(out / "lpp_style.manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=1, sort_keys=True)
        fh.write("\n")


TOPICS = [
    ("transit", "council", "ridership", "fares", "riders"),
    ("school", "district", "payroll", "salaries", "teachers"),
    ("hospital", "health board", "staffing", "wait times", "patients"),
    ("farm", "water agency", "irrigation", "allocations", "growers"),
    ("police", "department", "crime", "patrols", "neighborhoods"),
    ("energy", "utility", "billing", "rates", "households"),
    ("housing", "authority", "permit", "rents", "tenants"),
    ("tax", "county", "assessment", "levies", "homeowners"),
]
# unrelated filler for the head of the article
FILLER = [
    "The weather on the day of the event was mild and sunny.",
    "Several local musicians performed before the speeches began.",
    "Parking near the venue filled up early in the morning.",
    "A short film about regional history opened the program.",
    "Volunteers handed out flyers and bottles of water at the entrance.",
    "Photographers lined the back wall of the crowded hall.",
    "A reception with coffee and pastries followed the remarks.",
    "Traffic on the main avenue slowed as the crowd dispersed.",
    "Organizers thanked sponsors and local businesses for their help.",
    "Reporters gathered in the lobby while staff set up chairs.",
]
# a tightly knit cluster for the tail: topical and central under LexRank, but
# without the figures that the claim and verdict turn on
CLUSTER = [
    "Officials said the annual {measure} report for {group} would be published next year.",
    "The annual {measure} report, officials said, would be reviewed next year.",
    "Officials said next year the annual report on {group} would be reviewed and published.",
    "Officials said the {measure} report would be published next year by the annual review office.",
    "The officials said the annual report on {measure} would be reviewed next year.",
    "Next year officials said the annual {group} report would be published and reviewed.",
]


def synthetic_triple(rng, i, dataset, n_verdict):
    subject, agency, thing, measure, group = rng.choice(TOPICS)
    claimed, actual = rng.randint(30, 90), rng.randint(2, 25)
    claim = f"The {agency} raised {measure} for {group} by {claimed} percent."
    evidence = [
        f"Records from the {agency} show {measure} for {group} rose {actual} percent, not {claimed} percent.",
        f"The {subject} {thing} figures confirm the {measure} increase for {group} was modest.",
        f"Analysts said the {agency} claim about {measure} overstates the change for {group}.",
        f"Older {thing} data on {measure} for {group} show a similar pattern.",
        f"A review of {agency} budgets found no {claimed} percent rise in {measure}.",
        f"Officials acknowledged the {measure} figure for {group} was exaggerated.",
    ]
    rng.shuffle(evidence)
    head = rng.sample(FILLER, n_verdict + 1)
    tail = [c.format(measure=measure, group=group) for c in rng.sample(CLUSTER, 5)]
    article = head + evidence[:n_verdict] + tail
    return {
        "id": f"{dataset}-{i:03d}",
        "dataset": dataset,
        "claim": claim,
        "article": " ".join(article),
        "verdict": " ".join(evidence[:n_verdict]),
    }


def bench_fixture():
    rng = random.Random(20240915)
    out = FIX / "bench"
    out.mkdir(parents=True, exist_ok=True)
    for dataset, n_verdict, count in (("liarpp", 6, 24), ("fullfact", 2, 24)):
        with open(out / f"{dataset}.jsonl", "w") as fh:
            for i in range(count):
                fh.write(json.dumps(synthetic_triple(rng, i, dataset, n_verdict)) + "\n")


if __name__ == "__main__":
    analysis_fixture()
    bench_fixture()
