import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'cgspan_backend.settings')
django.setup()
