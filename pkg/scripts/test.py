#!/usr/bin/env python3
"""
Smoke Test for dualvote
Checks dependencies, fuses the shipped cooling-system fixture and runs a small synthetic panel
"""

import os
import sys
import logging
import tempfile
from pathlib import Path

# Add parent directory to path for imports
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / 'data' / 'fixtures'


def setup_logging():
    """Setup logging for testing"""
    logging.basicConfig(
        level=logging.WARNING,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )


def check_dependencies():
    """Check if all dependencies are available"""
    print("🔍 Checking Dependencies...")

    required_packages = [
        ('numpy', 'numpy'),
        ('pandas', 'pandas'),
        ('sklearn', 'scikit-learn'),
        ('torch', 'torch'),
        ('pydantic', 'pydantic'),
        ('yaml', 'PyYAML'),
    ]

    missing = []
    for package, pip_name in required_packages:
        try:
            __import__(package)
            print(f"✅ {package}")
        except ImportError:
            missing.append(pip_name)
            print(f"❌ {package} (install: pip install {pip_name})")

    if missing:
        print(f"\n⚠️  Missing dependencies: {', '.join(missing)}")
        print(f"Install with: pip install {' '.join(missing)}")
        return False
    print(f"\n✅ All dependencies available!")
    return True


def test_fixture_fusion():
    """Fuse the shipped vote and MAE tables; expects N = 6 + 4 = 10"""
    print("\n🗳️  Testing fixture-mode fusion...")
    try:
        from src.fusion import dual_fusion, labels_from_vote_table, load_mae_table

        labels = labels_from_vote_table(FIXTURES / 'cooling_votes.tsv')
        mae = load_mae_table(FIXTURES / 'cooling_mae.tsv')
        result = dual_fusion(labels, mae)

        print(f"📊 N_a={result.n_a}  N_b=({result.n_b1}, {result.n_b2a}, {result.n_b2b}) -> {result.n_b}  N={result.n}")
        print(f"⚖️  W={list(result.weights.W)}  R={list(result.weights.R)}")
        if (result.n_a, result.n_b, result.n) != (6, 4, 10):
            print("❌ Unexpected counts")
            return False
        print("✅ Fixture fusion matches N = 6 + 4 = 10")
        return True
    except Exception as e:
        print(f"❌ Fixture fusion failed: {e}")
        return False


def test_synthetic_run():
    """End-to-end run on a small seeded sinusoid with three spikes"""
    print("\n📈 Testing synthetic end-to-end run...")
    try:
        import numpy as np
        import pandas as pd
        from src.pipeline import AnomalyPipeline, PipelineConfig

        rng = np.random.default_rng(7)
        n = 2000
        t = np.arange(n)
        values = np.column_stack([np.sin(2 * np.pi * t / 50 + phase) for phase in (0.0, 1.0, 2.0)])
        values += rng.normal(0, 0.05, values.shape)
        spikes = [1700, 1800, 1900]
        values[spikes] += 10 * values[:1600].std(axis=0)

        with tempfile.TemporaryDirectory() as tmp:
            csv_path = Path(tmp) / 'sensors.csv'
            frame = pd.DataFrame(values, columns=['a', 'b', 'c'])
            frame.insert(0, 'timestamp', pd.date_range('2024-01-01', periods=n, freq='s'))
            frame.to_csv(csv_path, index=False)

            config = PipelineConfig(input=csv_path, output_dir=Path(tmp) / 'out', seed=1)
            report = AnomalyPipeline(config).run()

            expected = {str(pd.Timestamp('2024-01-01') + pd.Timedelta(seconds=s))[:19] for s in spikes}
            found = {instant[:19] for instant in report.fusion.final}
            print(f"📊 N={report.fusion.n} ({report.fusion.selected_method}); spikes found {len(expected & found)}/3")
            for detector in report.detectors:
                print(f"  {detector.name} {detector.kind}: mae={detector.mae:.4f}")
            if not expected <= found:
                print("❌ Missed injected spikes")
                return False
        print("✅ Synthetic run found every injected spike")
        return True
    except Exception as e:
        print(f"❌ Synthetic run failed: {e}")
        return False


def main():
    setup_logging()

    print("🚀 dualvote Smoke Test")
    print("=" * 50)

    if not check_dependencies():
        print("\n❌ Cannot run tests without required dependencies")
        sys.exit(1)

    fusion_ok = test_fixture_fusion()
    synthetic_ok = test_synthetic_run()

    print("\n" + "=" * 50)
    print("📋 Test Summary:")
    print(f"Fixture fusion: {'✅ PASS' if fusion_ok else '❌ FAIL'}")
    print(f"Synthetic run: {'✅ PASS' if synthetic_ok else '❌ FAIL'}")

    if not (fusion_ok and synthetic_ok):
        sys.exit(1)
    print("\n🎉 All smoke tests passed!")


if __name__ == "__main__":
    main()
