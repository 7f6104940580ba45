#!/usr/bin/env python3
"""
Punto de entrada de la línea de comandos

Uso:
    python run_cli.py check-sym data/example1.json
    python run_cli.py --out reports superactivate data/example1.json data/example2.json
    python run_cli.py reproduce
"""

import sys

try:
    from src.cli import main
except ImportError as e:
    print(f"❌ Error importando módulos: {e}")
    print("💡 Asegúrate de instalar las dependencias con: pip install -r requirements.txt")
    sys.exit(1)

if __name__ == "__main__":
    sys.exit(main())
