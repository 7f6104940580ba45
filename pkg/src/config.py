"""
Configuración para el toolkit AVWC (canales wiretap cuántico-clásicos arbitrariamente variables)
"""
import os
from dotenv import load_dotenv

# Cargar variables de entorno
load_dotenv()


class Config:
    """Configuración centralizada para AVWC Toolkit y su servidor MCP"""

    # Configuración del servidor
    PORT: int = int(os.getenv('PORT', '8000'))
    NODE_ENV: str = os.getenv('NODE_ENV', 'development')

    # Logaritmos: bits por defecto
    LOG_BASE: float = float(os.getenv('LOG_BASE', '2'))

    # Límites de dimensión y enumeración
    DIM_CAP: int = int(os.getenv('DIM_CAP', '1024'))
    FUNCTION_CAP: int = int(os.getenv('FUNCTION_CAP', '256'))
    CORR_ENUM_CAP: int = int(os.getenv('CORR_ENUM_CAP', '4096'))
    SWEEP_CAP: int = int(os.getenv('SWEEP_CAP', '4096'))

    # Solver de simetrizabilidad (programa lineal)
    SYM_TOL: float = float(os.getenv('SYM_TOL', '1e-8'))
    SYM_MAX_ITER: int = int(os.getenv('SYM_MAX_ITER', '5000'))

    # Búsqueda minimax sobre símplices
    GRID_POINTS: int = int(os.getenv('GRID_POINTS', '64'))
    JAMMER_GRID_POINTS: int = int(os.getenv('JAMMER_GRID_POINTS', '64'))
    REFINE_TOL: float = float(os.getenv('REFINE_TOL', '1e-6'))
    LEAKAGE_ORDER: int = int(os.getenv('LEAKAGE_ORDER', '1'))
    LEAKAGE_DIM_CAP: int = int(os.getenv('LEAKAGE_DIM_CAP', '64'))
    ALPHABET_GRID_CAP: int = int(os.getenv('ALPHABET_GRID_CAP', '4'))

    # Reportes y reproducibilidad
    OUTPUT_DIR: str = os.getenv('OUTPUT_DIR', 'reports')
    SEED: int = int(os.getenv('SEED', '20240101'))

    @classmethod
    def validate(cls) -> None:
        """Validar que los límites y tolerancias tengan valores utilizables"""
        positive_vars = [
            'PORT',
            'DIM_CAP',
            'FUNCTION_CAP',
            'CORR_ENUM_CAP',
            'SWEEP_CAP',
            'SYM_TOL',
            'SYM_MAX_ITER',
            'GRID_POINTS',
            'JAMMER_GRID_POINTS',
            'REFINE_TOL',
            'LEAKAGE_ORDER',
            'LEAKAGE_DIM_CAP',
            'ALPHABET_GRID_CAP',
        ]

        invalid_vars = [name for name in positive_vars if not getattr(cls, name) > 0]
        if cls.LOG_BASE <= 1:
            invalid_vars.append('LOG_BASE')

        if invalid_vars:
            print("❌ Las siguientes variables de entorno tienen valores inválidos:")
            for var in invalid_vars:
                print(f"   - {var} = {getattr(cls, var)}")

            # En production, solo advertir pero no fallar
            if cls.NODE_ENV == 'production':
                print("⚠️  Continuando en modo producción - algunos cálculos pueden fallar")
                return
            raise ValueError(f"Variables de entorno inválidas: {', '.join(invalid_vars)}")


# Instancia global de configuración
config = Config()

# Validar configuración al importar (solo si no estamos en tests)
if __name__ != "__main__" and not os.getenv('TESTING'):
    try:
        config.validate()
    except ValueError as e:
        print(f"⚠️  Warning: {e}")
