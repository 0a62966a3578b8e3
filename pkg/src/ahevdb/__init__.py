"""Inner-product similarity search over additively homomorphic encrypted
vectors, with a Paillier backend, a noise-growth model for noisy AHE
schemes, and benchmark harnesses."""

__version__ = "0.1.0"

from .encoding import (
    BudgetReport,
    EncodingParams,
    decode_score,
    decode_signed,
    encode_signed,
    overflow_budget,
)
from .errors import (
    AhevdbError,
    CorruptCiphertextError,
    IntegrityError,
    KeyMismatchError,
    StoreCorruptError,
    StoreFormatError,
    ValidationError,
)
from .noise import (
    ConstantX,
    NoiseParams,
    NoiseReport,
    UniformIntX,
    accumulate_noise,
    predict_variance,
    simulate,
    worst_case_bound,
)
from .paillier import (
    Ciphertext,
    PublicKey,
    SecretKey,
    ct_add,
    decrypt,
    encrypt,
    keygen,
    rerandomize,
    scalar_mul,
    scalar_mul_naive,
)
from .similarity import (
    EncVector,
    PlainVector,
    ScoredMatch,
    batch_similarity,
    encrypt_vector,
    inner_product,
    inner_product_naive,
    topk,
)
from .store import (
    StoreHeader,
    StoreRecord,
    load_db,
    load_keys,
    load_public_key,
    save_db,
    save_keys,
)

__all__ = [
    "AhevdbError",
    "BudgetReport",
    "Ciphertext",
    "ConstantX",
    "CorruptCiphertextError",
    "EncVector",
    "EncodingParams",
    "IntegrityError",
    "KeyMismatchError",
    "NoiseParams",
    "NoiseReport",
    "PlainVector",
    "PublicKey",
    "ScoredMatch",
    "SecretKey",
    "StoreCorruptError",
    "StoreFormatError",
    "StoreHeader",
    "StoreRecord",
    "UniformIntX",
    "ValidationError",
    "accumulate_noise",
    "batch_similarity",
    "ct_add",
    "decode_score",
    "decode_signed",
    "decrypt",
    "encode_signed",
    "encrypt",
    "encrypt_vector",
    "inner_product",
    "inner_product_naive",
    "keygen",
    "load_db",
    "load_keys",
    "load_public_key",
    "overflow_budget",
    "predict_variance",
    "rerandomize",
    "save_db",
    "save_keys",
    "scalar_mul",
    "scalar_mul_naive",
    "simulate",
    "topk",
    "worst_case_bound",
]
