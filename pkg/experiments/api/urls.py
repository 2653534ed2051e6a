from django.urls import path
from experiments.api import views

urlpatterns = [
    # Presets
    path('presets/', views.PresetListView.as_view(), name='preset-list'),
    path('presets/<str:name>/', views.PresetDetailView.as_view(), name='preset-detail'),
    path('validate/', views.ConfigValidateView.as_view(), name='config-validate'),

    # Run registry
    path('runs/', views.ExperimentRunListView.as_view(), name='run-list'),
    path('runs/<int:pk>/', views.ExperimentRunDetailView.as_view(), name='run-detail'),
]
