"""Emit golden files for the C++ test suite from a reference SELFIES + RDKit stack.

Usage: python3 harness/emit_golden.py --k 6 7 [--out golden]
       python3 harness/emit_golden.py --k --probes

Writes
  unique_counts.csv        k, total, unique decodings (empty string counted), unique non-empty
  logp_<k>token.golden     one row per unique non-empty molecule, keyed by the
                           smallest bitstring that decodes to it
  qed_<k>token.golden      the eight QED inputs and QED for the same molecules
  sa_probe.golden          SA score and its ring and stereo counts for hand-picked
                           molecules with bridges, spiro atoms, macrocycles and
                           aromatic rings (with --probes)
Each file starts with a '# manifest:' line naming the pinned stack versions.
"""
import argparse
import itertools
import os
import sys

try:
    import selfies as sf
    from rdkit import Chem, RDLogger, rdBase
    from rdkit.Chem import QED, RDConfig, rdMolDescriptors
except ImportError as err:  # pragma: no cover
    sys.exit(f"missing dependency ({err}); pip install -r harness/requirements.lock")

sys.path.append(os.path.join(RDConfig.RDContribDir, "SA_Score"))
import sascorer  # noqa: E402

RDLogger.DisableLog("rdApp.*")

# Table order == code order 000..111
VOCAB_2_3 = ["[C]", "[O]", "[N]", "[F]", "[=C]", "[#N]", "[Ring1]", "[Branch1]"]
BITS = 3


def manifest():
    return f"# manifest: selfies={sf.__version__} rdkit={rdBase.rdkitVersion} vocab=table_2_3"


def drug_loss(mol, alpha=2.0, beta=1.0):
    # Reproduces the published values (e.g. CCCCCO -> 0.3767): acyclic and
    # small-ring molecules take the 1.0 branch, rings > 7 atoms the 1.2 branch.
    qed = QED.qed(mol)
    big_ring = any(len(r) > 7 for r in mol.GetRingInfo().AtomRings())
    a = (1.2 if big_ring else 1.0) - qed
    b = sascorer.calculateScore(mol) / 10.0
    return qed, b * 10.0, (alpha * a + beta * b) / (alpha + beta)


def enumerate_space(k):
    seen = {}
    for idx, toks in enumerate(itertools.product(VOCAB_2_3, repeat=k)):
        smi = sf.decoder("".join(toks))
        mol = Chem.MolFromSmiles(smi)
        can = Chem.MolToSmiles(mol) if mol is not None else "!" + smi
        if can not in seen:
            seen[can] = (idx, mol)
    return seen


PROBES = [
    "C1CC2CCC1C2", "C1CN2CCC1CC2", "CC1CC2CCN1C2", "C1CC11CC1", "C1CCC2(C1)CCC2", "C12CC1C2",
    "C1CCCCCCCC1", "O=C1CCCCCCCCCCC1", "C1CC2CC1C1CC21", "C1C2CC3CC1CC(C2)C3", "CC(C)C1CCC(C)CC1O",
    "CC1CCC(C)CC1", "CC1CN1C", "CC1CO1", "CC(C)Cc1ccc(cc1)C(C)C(=O)O", "c1ccc2ccccc2c1", "c1ccc2occc2c1",
    "CC(=O)Nc1ccc(O)cc1", "CN1CCCC1c1cccnc1", "Cn1cnc2c1c(=O)n(C)c(=O)n2C", "FC(F)(F)c1ccc(Cl)cc1",
    "N#CCC(C1CCCC1)n1cc(-c2ncnc3occc23)cn1", "C1CCCCC2CCCCC2CCC1", "OC1C(O)C(O)C(O)C(O)C1O",
]


def write_probes(out):
    path = os.path.join(out, "sa_probe.golden")
    with open(path, "w") as fh:
        fh.write(manifest() + "\n")
        fh.write("selfies,smiles,logp,qed,sas,stereo,spiro,bridgeheads\n")
        for smi in PROBES:
            selfies = sf.encoder(smi)
            mol = Chem.MolFromSmiles(sf.decoder(selfies))
            stereo = len(Chem.FindMolChiralCenters(mol, includeUnassigned=True))
            fh.write(f"{selfies},{Chem.MolToSmiles(mol)},{rdMolDescriptors.CalcCrippenDescriptors(mol)[0]:.6f},"
                     f"{QED.qed(mol):.6f},{sascorer.calculateScore(mol):.6f},{stereo},"
                     f"{rdMolDescriptors.CalcNumSpiroAtoms(mol)},{rdMolDescriptors.CalcNumBridgeheadAtoms(mol)}\n")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--k", type=int, nargs="*", default=[6, 7])
    ap.add_argument("--probes", action="store_true")
    ap.add_argument("--out", default="golden")
    ap.add_argument("--counts-only", type=int, nargs="*", default=[])
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)

    count_rows = []
    for k in args.k:
        seen = enumerate_space(k)
        nonempty = {c: v for c, v in seen.items() if c != ""}
        count_rows.append((k, len(VOCAB_2_3) ** k, len(seen), len(nonempty)))
        print(f"k={k}: {len(seen)} unique decodings", file=sys.stderr)
        if k in args.counts_only:
            continue
        path = os.path.join(args.out, f"logp_{k}token.golden")
        with open(path, "w") as fh:
            fh.write(manifest() + "\n")
            fh.write("bits,smiles,logp,qed,sas,drug_loss\n")
            for can, (idx, mol) in sorted(nonempty.items(), key=lambda kv: kv[1][0]):
                bits = format(idx, f"0{k * BITS}b")
                logp = rdMolDescriptors.CalcCrippenDescriptors(mol)[0]
                qed, sas, loss = drug_loss(mol)
                fh.write(f"{bits},{can},{logp:.6f},{qed:.6f},{sas:.6f},{loss:.6f}\n")
        path = os.path.join(args.out, f"qed_{k}token.golden")
        with open(path, "w") as fh:
            fh.write(manifest() + "\n")
            fh.write("bits,mw,alogp,hba,hbd,psa,rotb,arom,alerts,qed\n")
            for can, (idx, mol) in sorted(nonempty.items(), key=lambda kv: kv[1][0]):
                bits = format(idx, f"0{k * BITS}b")
                p = QED.properties(mol)
                fh.write(f"{bits},{p.MW:.6f},{p.ALOGP:.6f},{p.HBA},{p.HBD},{p.PSA:.6f},{p.ROTB},{p.AROM},"
                         f"{p.ALERTS},{QED.qed(mol, qedProperties=p):.6f}\n")

    if args.probes:
        write_probes(args.out)
    if not count_rows:
        return
    with open(os.path.join(args.out, "unique_counts.csv"), "w") as fh:
        fh.write(manifest() + "\n")
        fh.write("k,total,unique_decodings,unique_nonempty\n")
        for row in count_rows:
            fh.write(",".join(map(str, row)) + "\n")


if __name__ == "__main__":
    main()
