"""
Django settings for DiracFront project.
"""

from pathlib import Path
import os
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.environ.get('DJANGO_SECRET_KEY', 'django-insecure-dirac-front-local-key')

DEBUG = os.environ.get('DEBUG', 'False').lower() == 'true'

ALLOWED_HOSTS = []

# Application definition
INSTALLED_APPS = [
    'django.contrib.auth',
    'django.contrib.contenttypes',
    'rest_framework',
    'experiments',
]

# Database
DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': BASE_DIR / 'db.sqlite3',
    }
}

# Internationalization
LANGUAGE_CODE = 'en-us'
TIME_ZONE = 'UTC'
USE_I18N = True
USE_TZ = True

# Default primary key field type
DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# Numerics configuration
DIRAC_FRONT = {
    'THREADS': max(1, int(os.environ.get('DIRAC_FRONT_THREADS', os.cpu_count() or 1))),
    'DEFAULT_DELTA': 1e-6,
    'SINGLE_TOL_CELLS': 2,
    'COMPOUND_TOL_CELLS': 3,
    'DEFAULT_REPRESENTATION': 'weyl',
    'OUTPUT_ROOT': Path(os.environ.get('DIRAC_FRONT_OUTPUT', BASE_DIR / 'runs')),
    'LOG_LEVEL': os.environ.get('DIRAC_FRONT_LOG_LEVEL', 'INFO').upper(),
}

# Logging
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{asctime} {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': 'INFO',
    },
    'loggers': {
        'lab_services': {
            'level': DIRAC_FRONT['LOG_LEVEL'],
        },
        'experiments': {
            'level': DIRAC_FRONT['LOG_LEVEL'],
        },
    },
}
