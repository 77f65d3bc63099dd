#!/usr/bin/env python3
"""Writes the fixture corpus under data/fixtures.

With --cli, also runs the pipeline once with mock providers and records every
model response into data/fixtures/replay, so the replay config works offline.
"""
import argparse
import json
import shutil
import subprocess
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
FIX = ROOT / "data" / "fixtures"

DISEASES = {
    "MONDO:0010679": {
        "name": "Duchenne muscular dystrophy",
        "synonyms": ["DMD", "Duchenne dystrophy"],
        "differential_diseases": ["Becker muscular dystrophy"],
        "known_genes": ["DMD"],
        "known_phenotypes": ["walking delay", "Gowers sign", "loss of ambulation", "cardiomyopathy",
                             "respiratory insufficiency"],
        "category": "neuromuscular",
        "inheritance_pattern": "X-linked recessive",
        "pubmed_count": 1480,
        "pmc_fulltext_available": True,
    },
    "MONDO:0010311": {
        "name": "Becker muscular dystrophy",
        "synonyms": ["BMD"],
        "differential_diseases": ["Duchenne muscular dystrophy"],
        "known_genes": ["DMD"],
        "known_phenotypes": ["calf hypertrophy", "exercise intolerance", "proximal weakness", "cardiomyopathy"],
        "category": "neuromuscular",
        "inheritance_pattern": "X-linked recessive",
        "pubmed_count": 64,
        "pmc_fulltext_available": True,
    },
    "MONDO:0009568": {
        "name": "Spinal muscular atrophy type 1",
        "synonyms": ["Werdnig-Hoffmann disease"],
        "differential_diseases": [],
        "known_genes": ["SMN1"],
        "known_phenotypes": ["hypotonia", "tongue fasciculations", "feeding difficulties", "respiratory failure"],
        "category": "neuromuscular",
        "inheritance_pattern": "autosomal recessive",
        "pubmed_count": 15,
        "pmc_fulltext_available": False,
    },
}

# (pmid, disease, year, journal, publication types, citations, sentences)
DOCUMENTS = [
    ("30000001", "MONDO:0010679", 2019, "Neuromuscular Disorders", ["Journal Article", "Cohort Studies"], 48, [
        "Duchenne muscular dystrophy follows a predictable course in boys.",
        "Walking delay was reported at 2-5 years in the ambulatory stage.",
        "Gowers sign appeared at 5-8 years in the ambulatory stage.",
        "Loss of ambulation occurred at 8-12 years, the milestone of loss of ambulation, in the non-ambulatory stage.",
    ]),
    ("30000002", "MONDO:0010679", 2021, "Lancet Neurology", ["Review"], 210, [
        "Gowers sign is typically noticed at 4-6 years, the milestone of diagnosis, during the ambulatory stage.",
        "Cardiomyopathy developed at 10-18 years, the milestone of cardiomyopathy, in the non-ambulatory stage.",
        "Pathogenic variants in DMD abolish dystrophin expression.",
    ]),
    ("30000003", "MONDO:0010679", 2016, "Muscle & Nerve", ["Journal Article", "Multicenter Study"], 35, [
        "Respiratory insufficiency emerged at 15-20 years in the respiratory stage.",
        "Cardiomyopathy was detected between 10 and 18 years.",
        "Walking delay presented between 2 and 5 years.",
    ]),
    ("30000004", "MONDO:0010679", 2009, "Journal of Child Neurology", ["Case Reports"], 6, [
        "Loss of ambulation at 9-12 years was observed in this family.",
        "In one report cardiomyopathy was described at 150-160 years.",
        "Gowers sign was present at 5-7 years.",
    ]),
    ("30000005", "MONDO:0010679", 2023, "Neuromuscular Disorders", ["Journal Article", "Randomized Controlled Trial"], 12, [
        "Respiratory insufficiency at 16-20 years required ventilation.",
        "Walking delay at 2-4 years prompted referral.",
    ]),
    ("30000101", "MONDO:0010311", 2018, "Neuromuscular Disorders", ["Journal Article", "Cohort Studies"], 22, [
        "Becker muscular dystrophy has a milder course than Duchenne.",
        "Calf hypertrophy was seen at 5-10 years in the childhood stage.",
        "Exercise intolerance began at 10-20 years in the juvenile stage.",
        "Cardiomyopathy appeared at 20-40 years in the adult stage.",
    ]),
    ("30000102", "MONDO:0010311", 2020, "Muscle & Nerve", ["Review"], 40, [
        "Proximal weakness developed at 12-25 years in the adult stage.",
        "Cardiomyopathy was reported at 25-40 years in the adult stage.",
        "In-frame deletions in DMD preserve partial dystrophin.",
    ]),
    ("30000103", "MONDO:0010311", 2012, "Journal of Child Neurology", ["Case Reports"], 3, [
        "Calf hypertrophy at 6-9 years was the presenting feature.",
        "Exercise intolerance at 12-18 years limited sport.",
    ]),
    ("30000201", "MONDO:0009568", 2017, "Neuromuscular Disorders", ["Journal Article", "Cohort Studies"], 30, [
        "Spinal muscular atrophy type 1 presents in the first months of life.",
        "Hypotonia was evident at 0-6 months.",
        "Tongue fasciculations were seen at 1-6 months.",
        "Feeding difficulties began at 3-9 months.",
    ]),
    ("30000202", "MONDO:0009568", 2022, "Lancet Neurology", ["Review"], 95, [
        "Respiratory failure occurred at 6-24 months without treatment.",
        "Hypotonia at 0-5 months preceded diagnosis.",
    ]),
    ("30000203", "MONDO:0009568", 2015, "Muscle & Nerve", ["Journal Article"], 8, [
        "Homozygous deletion of SMN1 is found in most patients.",
        "Copy number of SMN2 modifies severity.",
    ]),
]

JOURNALS = [("Lancet Neurology", 1), ("Neuromuscular Disorders", 2), ("Muscle & Nerve", 2),
            ("Journal of Child Neurology", 3)]

# Disease-level onset labels (Orphadata style). The KG diseases are mixed in.
ORPHADATA = [
    ("Duchenne muscular dystrophy", "Childhood"),
    ("Spinal muscular atrophy type 1", "Infancy"),
    ("Rett syndrome", "1-3"),
    ("Angelman syndrome", "0-2"),
    ("Isolated congenital microcephaly", "Neonatal"),
    ("Congenital hydrocephalus", "Neonatal"),
    ("Tay-Sachs disease", "0-1"),
    ("Krabbe disease", "0-1"),
    ("Menkes disease", "0-1"),
    ("Zellweger syndrome", "Neonatal"),
    ("Dravet syndrome", "0-1"),
    ("West syndrome", "0-1"),
    ("Phenylketonuria", "Neonatal"),
    ("Cystic fibrosis", "0-2"),
    ("Friedreich ataxia", "10-15"),
    ("Wilson disease", "5-35"),
    ("Juvenile myoclonic epilepsy", "12-18"),
    ("Fabry disease", "4-10"),
    ("Alport syndrome", "5-20"),
    ("Stargardt disease", "6-20"),
    ("Leber hereditary optic neuropathy", "15-35"),
    ("Marfan syndrome", "Childhood"),
    ("Huntington disease", "35-45"),
    ("Amyotrophic lateral sclerosis", "50-65"),
    ("Myotonic dystrophy type 1", "20-40"),
    ("Facioscapulohumeral muscular dystrophy", "15-30"),
    ("Hereditary transthyretin amyloidosis", "50-70"),
    ("Spinocerebellar ataxia type 3", "30-50"),
    ("CADASIL", "40-60"),
    ("Fragile X-associated tremor/ataxia syndrome", "60-75"),
    ("Pompe disease", "All ages"),
    ("Gaucher disease", "All ages"),
    ("Niemann-Pick disease type C", "Childhood"),
    ("Adrenoleukodystrophy", "4-8"),
    ("Metachromatic leukodystrophy", "1-3"),
    ("Neurofibromatosis type 1", "Childhood"),
    ("Tuberous sclerosis complex", "Infancy"),
    ("Hereditary hemorrhagic telangiectasia", "10-40"),
    ("Polycystic kidney disease", "30-50"),
    ("Paget disease of bone", "55-75"),
]

# HPOA-style onset annotations (database_id, disease_name, hpo_id, aspect, onset).
HPOA = [
    ("OMIM:253300", "Spinal muscular atrophy type 1", "HP:0003593"),
    ("OMIM:312750", "Rett syndrome", "HP:0011463"),
    ("OMIM:105830", "Angelman syndrome", "HP:0003593"),
    ("OMIM:272800", "Tay-Sachs disease", "HP:0003593"),
    ("OMIM:245200", "Krabbe disease", "HP:0003593"),
    ("OMIM:214100", "Zellweger syndrome", "HP:0003623"),
    ("OMIM:607208", "Dravet syndrome", "HP:0003593"),
    ("OMIM:261600", "Phenylketonuria", "HP:0003623"),
    ("OMIM:229300", "Friedreich ataxia", "HP:0003621"),
    ("OMIM:277900", "Wilson disease", "HP:0011463"),
    ("OMIM:606904", "Juvenile myoclonic epilepsy", "HP:0003621"),
    ("OMIM:301500", "Fabry disease", "HP:0011463"),
    ("OMIM:248200", "Stargardt disease", "HP:0003621"),
    ("OMIM:143100", "Huntington disease", "HP:0003596"),
    ("OMIM:105400", "Amyotrophic lateral sclerosis", "HP:0003584"),
    ("OMIM:160900", "Myotonic dystrophy type 1", "HP:0011462"),
    ("OMIM:158900", "Facioscapulohumeral muscular dystrophy", "HP:0011462"),
    ("OMIM:105210", "Hereditary transthyretin amyloidosis", "HP:0003584"),
    ("OMIM:109150", "Spinocerebellar ataxia type 3", "HP:0003596"),
    ("OMIM:125310", "CADASIL", "HP:0003596"),
    ("OMIM:300623", "Fragile X-associated tremor/ataxia syndrome", "HP:0003584"),
    ("OMIM:300100", "Adrenoleukodystrophy", "HP:0011463"),
    ("OMIM:250100", "Metachromatic leukodystrophy", "HP:0011463"),
    ("OMIM:173900", "Polycystic kidney disease", "HP:0003581"),
    ("OMIM:167250", "Paget disease of bone", "HP:0003584"),
    ("OMIM:300377", "Isolated congenital microcephaly", "HP:0003577"),
]

GENEREVIEWS = [
    ("Duchenne muscular dystrophy", 2, 5),
    ("Spinal muscular atrophy type 1", 0, 0.5),
    ("Friedreich ataxia", 10, 15),
    ("Huntington disease", 30, 50),
]

# (case id, disease, disease onset, [(feature id, label, onset iso)])
PHENOPACKETS = [
    ("PMID_30000201_case1", "MONDO:0009568", "Spinal muscular atrophy type 1", "P3M",
     [("HP:0001252", "Hypotonia", "P2M"), ("HP:0001308", "Tongue fasciculations", "P3M")]),
    ("PMID_30000201_case2", "MONDO:0009568", "Spinal muscular atrophy type 1", "P4M",
     [("HP:0001252", "Hypotonia", "P4M"), ("HP:0011968", "Feeding difficulties", "P6M")]),
    ("PMID_30000202_case1", "MONDO:0009568", "Spinal muscular atrophy type 1", "P2M",
     [("HP:0001252", "Hypotonia", "P1M"), ("HP:0011968", "Feeding difficulties", "P5M")]),
    ("PMID_30000001_case1", "MONDO:0010679", "Duchenne muscular dystrophy", "P4Y",
     [("HP:0003391", "Gowers sign", "P5Y"), ("HP:0001638", "Cardiomyopathy", "P14Y")]),
    ("PMID_30000001_case2", "MONDO:0010679", "Duchenne muscular dystrophy", "P3Y",
     [("HP:0003391", "Gowers sign", "P6Y"), ("HP:0001638", "Cardiomyopathy", "P16Y")]),
    ("PMID_31000001_case1", "MONDO:0010726", "Rett syndrome", "P1Y6M",
     [("HP:0002376", "Developmental regression", "P1Y6M"), ("HP:0001336", "Myoclonus", "P3Y")]),
    ("PMID_31000001_case2", "MONDO:0010726", "Rett syndrome", "P2Y",
     [("HP:0002376", "Developmental regression", "P2Y")]),
    ("PMID_31000002_case1", "MONDO:0007739", "Huntington disease", "P38Y",
     [("HP:0002072", "Chorea", "P38Y"), ("HP:0000726", "Dementia", "P45Y")]),
    ("PMID_31000002_case2", "MONDO:0007739", "Huntington disease", "P44Y",
     [("HP:0002072", "Chorea", "P44Y")]),
    ("PMID_31000003_case1", "MONDO:0009869", "Friedreich ataxia", "P11Y",
     [("HP:0001251", "Ataxia", "P11Y"), ("HP:0001638", "Cardiomyopathy", "P15Y")]),
]

# Static association snapshot: (disease, [(drug)], [(gene)])
STATIC = [
    ("Duchenne muscular dystrophy", ["Deflazacort", "Eteplirsen"], ["DMD"]),
    ("Becker muscular dystrophy", [], ["DMD"]),
    ("Spinal muscular atrophy type 1", ["Nusinersen", "Risdiplam"], ["SMN1"]),
    ("Cystic fibrosis", ["Ivacaftor", "Dornase alfa"], ["CFTR"]),
    ("Phenylketonuria", ["Sapropterin"], ["PAH"]),
    ("Wilson disease", ["Penicillamine", "Trientine"], ["ATP7B"]),
    ("Fabry disease", ["Agalsidase beta", "Migalastat"], ["GLA"]),
    ("Gaucher disease", ["Imiglucerase", "Eliglustat"], ["GBA1"]),
    ("Pompe disease", ["Alglucosidase alfa"], ["GAA"]),
    ("Huntington disease", ["Tetrabenazine"], ["HTT"]),
    ("Amyotrophic lateral sclerosis", ["Riluzole", "Edaravone"], ["SOD1"]),
    ("Dravet syndrome", ["Stiripentol", "Fenfluramine"], ["SCN1A"]),
    ("Tuberous sclerosis complex", ["Everolimus"], ["TSC2"]),
    ("Hereditary transthyretin amyloidosis", ["Tafamidis", "Patisiran"], ["TTR"]),
    ("Friedreich ataxia", ["Omaveloxolone"], ["FXN"]),
    ("Rett syndrome", ["Trofinetide"], ["MECP2"]),
    ("Marfan syndrome", ["Losartan"], ["FBN1"]),
    ("Neurofibromatosis type 1", ["Selumetinib"], ["NF1"]),
    ("Paget disease of bone", ["Zoledronic acid"], ["SQSTM1"]),
    ("Adrenoleukodystrophy", ["Elivaldogene autotemcel"], ["ABCD1"]),
]

PHENOTYPE_IDS = {
    "cardiomyopathy": "HP:0001638",
    "Gowers sign": "HP:0003391",
    "loss of ambulation": "HP:0002505",
    "respiratory insufficiency": "HP:0002093",
    "calf hypertrophy": "HP:0008981",
    "proximal weakness": "HP:0003701",
    "hypotonia": "HP:0001252",
    "tongue fasciculations": "HP:0001308",
    "feeding difficulties": "HP:0011968",
    "respiratory failure": "HP:0002878",
}

SCHEMA_PHENOTYPES = [
    ("Duchenne muscular dystrophy", ["cardiomyopathy", "Gowers sign", "loss of ambulation", "respiratory insufficiency"]),
    ("Becker muscular dystrophy", ["cardiomyopathy", "calf hypertrophy", "proximal weakness"]),
    ("Spinal muscular atrophy type 1", ["hypotonia", "tongue fasciculations", "feeding difficulties", "respiratory failure"]),
]


def disease_ids():
    ids = {v["name"]: k for k, v in DISEASES.items()}
    n = 1000000
    for name, *_ in STATIC:
        if name not in ids:
            ids[name] = f"MONDO:{n:07d}"
            n += 1
    return ids


def write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def write_json(path: Path, obj):
    write(path, json.dumps(obj, indent=2, ensure_ascii=False) + "\n")


def config(kind: str) -> str:
    def models(names, opts=None):
        lines = []
        for i, n in enumerate(names):
            lines.append(f"    - name: {n}\n      kind: {kind}")
            if kind == "mock" and opts and opts[i]:
                lines.append(f"      model: \"{opts[i]}\"")
        return "\n".join(lines)

    return f"""pipeline:
  consensus_threshold: 2
  fuzzy_threshold: 80
  age_bounds: [0, 120]
  extraction_date: "2026-01-15"
  pipeline_version: "1.0.0"
  reference_year: 2026
  conflict_gap_years: 10
  document_caps:
    standard: 150
seeds:
  benchmark: 42
  bootstrap: 42
  judge_sample: 42
  kmeans: 42
  linkpred: [42, 7, 123]
sources:
  ontology: fixture
  documents: fixture
paths:
  ontology: ontology
  documents: documents
  journal_tiers: journal_tiers.tsv
  schema: schema.tsv
  orphadata: gold/orphadata.tsv
  hpoa: gold/hpoa.tsv
  genereviews: gold/genereviews.tsv
  phenopackets: phenopackets
  replay: replay
  store: ../../out/store
  output: ../../out/reports
providers:
  primary:
{models(["model-a", "model-b", "model-c"], ["", "drop_every=3,offset=1", "drop_every=3,offset=2"])}
  tiebreaker:
    name: model-t
    kind: {kind}
  judges:
{models(["judge-1", "judge-2", "judge-3"])}
  rag:
{models(["rag-1"])}
diseases:
  - MONDO:0010679
  - MONDO:0010311
  - MONDO:0009568
"""


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--cli", help="chronokg binary; records the replay cache when given")
    args = ap.parse_args()

    for sub in ("ontology", "documents", "gold", "phenopackets"):
        shutil.rmtree(FIX / sub, ignore_errors=True)

    for curie, rec in DISEASES.items():
        write_json(FIX / "ontology" / (curie.replace(":", "_") + ".json"), {"disease_id": curie, **rec})

    for pmid, disease, year, journal, types, cites, sents in DOCUMENTS:
        name = DISEASES[disease]["name"]
        write_json(FIX / "documents" / f"{pmid}.json", {
            "pmid": pmid,
            "title": f"{name}: clinical course and onset ({year})",
            "text": " ".join(sents),
            "publication_year": year,
            "journal": journal,
            "publication_types": types,
            "citation_count": cites,
        })

    write(FIX / "journal_tiers.tsv", "".join(f"{j}\t{l}\n" for j, l in JOURNALS))
    write(FIX / "gold" / "orphadata.tsv", "disease\tonset\n" + "".join(f"{d}\t{o}\n" for d, o in ORPHADATA))
    write(FIX / "gold" / "hpoa.tsv",
          "database_id\tdisease_name\tqualifier\thpo_id\treference\tevidence\tonset\tfrequency\tsex\tmodifier\taspect\n"
          + "".join(f"{db}\t{d}\t\t{h}\tPMID:1\tTAS\t\t\t\t\tC\n" for db, d, h in HPOA))
    write(FIX / "gold" / "genereviews.tsv",
          "disease\tonset_min\tonset_max\n" + "".join(f"{d}\t{a}\t{b}\n" for d, a, b in GENEREVIEWS))

    for cid, did, dname, donset, feats in PHENOPACKETS:
        write_json(FIX / "phenopackets" / f"{cid}.json", {
            "id": cid,
            "subject": {"id": cid.split("_")[-1]},
            "phenotypicFeatures": [
                {"type": {"id": fid, "label": lab}, "onset": {"age": {"iso8601duration": iso}}}
                for fid, lab, iso in feats
            ],
            "diseases": [{"term": {"id": did, "label": dname}, "onset": {"age": {"iso8601duration": donset}}}],
        })

    ids = disease_ids()
    rows = ["head_id\thead_type\trelation\ttail_id\ttail_type\thead_name\ttail_name"]
    for dname, phens in SCHEMA_PHENOTYPES:
        for p in phens:
            rows.append(f"{ids[dname]}\tdisease\tdisease_phenotype_positive\t{PHENOTYPE_IDS[p]}\teffect/phenotype\t{dname}\t{p}")
    drug_n, gene_ids = 1, {}
    for dname, drugs, genes in STATIC:
        for g in genes:
            gid = gene_ids.setdefault(g, f"NCBIGene:{1000 + len(gene_ids)}")
            rows.append(f"{ids[dname]}\tdisease\tdisease_protein\t{gid}\tgene/protein\t{dname}\t{g}")
        for d in drugs:
            rows.append(f"DB{drug_n:05d}\tdrug\tindication\t{ids[dname]}\tdisease\t{d}\t{dname}")
            drug_n += 1
    write(FIX / "schema.tsv", "\n".join(rows) + "\n")

    write(FIX / "config.yaml", config("replay"))
    write(FIX / "config.mock.yaml", config("mock"))

    if args.cli:
        replay = FIX / "replay"
        shutil.rmtree(replay, ignore_errors=True)
        with tempfile.TemporaryDirectory() as tmp:
            base = [args.cli, "--config", str(FIX / "config.mock.yaml")]
            store, out = f"{tmp}/store", f"{tmp}/out"
            run = lambda *a: subprocess.run(base + list(a), check=True)
            run("pipeline", "run", "--store", store, "--out", out, "--record-to", str(replay))
            run("judge", "--store", store, "--out", out, "--n", "10", "--record-to", str(replay))
            run("bench", "gen", "--store", store, "--out", out)
            run("rag", "run", "--store", store, "--out", out, "--record-to", str(replay))


if __name__ == "__main__":
    main()
