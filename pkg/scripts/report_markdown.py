#!/usr/bin/env python3
"""
Verify Report Generator
Renders the JSON envelope written by `galton verify --out` as Markdown
"""

import argparse
import json
from datetime import datetime
from pathlib import Path


def parse_args():
    """Parse command line arguments."""
    ap = argparse.ArgumentParser(description="Render a verify report as Markdown")
    ap.add_argument("--report", default="report.json", help="Path to the verify JSON envelope")
    ap.add_argument("--out", default="REPORT.md", help="Output Markdown file")
    ap.add_argument("--ks-threshold", type=float, default=0.07, help="KS distance considered acceptable")
    return ap.parse_args()


def load_report(path):
    """Load the envelope and return (envelope, result)."""
    if not Path(path).exists():
        raise SystemExit(f"report not found: {path}")
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return data, data.get("result", data)


def fmt(value, digits=4):
    """Format an optional float."""
    return "-" if value is None else f"{value:.{digits}f}"


def get_distance_status(ks, threshold):
    """Status emoji for a KS distance."""
    if ks is None:
        return "⚠️ sin referencia"
    if ks <= threshold / 2:
        return f"🚀 {ks:.3f}"
    if ks <= threshold:
        return f"📈 {ks:.3f}"
    return f"❌ {ks:.3f}"


def rate_section(rate):
    """Lines describing the rate fit."""
    if rate is None:
        return ["- Sin ajuste de tasa\n"]
    if rate.get("exact_regime"):
        return ["- 🎯 **Régimen exacto:** dispersión nula en todos los tamaños\n"]
    return [
        f"- **Pendiente:** {fmt(rate['slope'])} ± {fmt(rate['stderr'])}\n",
        f"- **IC 95%:** [{fmt(rate['ci_low'])}, {fmt(rate['ci_high'])}]\n",
        f"- **Puntos:** {len(rate.get('points', []))}\n",
    ]


def main():
    """Main report generation function."""
    args = parse_args()
    envelope, result = load_report(args.report)
    cfg = result.get("config", {})

    buf = []
    buf.append(f"# Informe de verificación: {cfg.get('name') or 'experimento'}\n")
    buf.append(f"**Generado:** {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}\n")
    buf.append(f"**Herramienta:** {envelope.get('tool', '?')} {envelope.get('version', '')}\n")
    buf.append(f"**Semilla:** {result.get('seed')} · **Hash:** `{result.get('config_hash', '')[:16]}`\n\n")

    buf.append("## 📊 Resumen\n\n")
    buf.append(f"- **Estadístico:** {cfg.get('statistic')} · **Base de escala:** {cfg.get('scaling_base')}\n")
    buf.append(f"- **Exponentes:** {', '.join(cfg.get('scalings', []))}\n")
    buf.append(f"- **Valor poblacional:** {fmt(result.get('population_value'), 6)}\n")
    monotone = result.get("monotone_evidence")
    if monotone is not None:
        buf.append(f"- **Evidencia monótona:** {'✅' if monotone else '❌'}\n")
    buf.append(f"- **Tiempo total:** {fmt(result.get('wall_clock'), 1)} s\n\n")

    buf.append("## 📈 Por tamaño\n\n")
    buf.append("| n | m | s | media | sd | ceros | KS | W1 | t (s) |\n")
    buf.append("|---|---|---|-------|----|-------|----|----|-------|\n")
    for size in result.get("sizes", []):
        for scaled in size["scaled"]:
            buf.append(
                f"| {size['n']} | {size['m']} | {scaled['exponent']} | {fmt(scaled['mean'])} | "
                f"{fmt(scaled['sd'])} | {size['zero_fraction']:.2f} | "
                f"{get_distance_status(scaled.get('ks'), args.ks_threshold)} | "
                f"{fmt(scaled.get('wasserstein1'))} | {size['wall_time']:.1f} |\n"
            )
    buf.append("\n")

    buf.append("## 🎯 Tasa de convergencia\n\n")
    buf.extend(rate_section(result.get("rate")))

    Path(args.out).write_text("".join(buf), encoding="utf-8")
    print(f"✅ Informe escrito en {args.out}")


if __name__ == "__main__":
    main()
